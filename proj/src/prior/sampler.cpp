#include "latentflow/prior/sampler.hpp"

namespace lf::prior {

NoisePredictor network_predictor(const ad::BoundParams& params, const DenoiserConfig& config) {
  return [&params, config](ad::Var z_t, const std::vector<std::size_t>& t) {
    return predict_noise(params, config, z_t, t);
  };
}

ad::Var ddim_chain(const NoisePredictor& eps, ad::Var z_T, const NoiseSchedule& schedule, std::size_t n_steps) {
  const auto taus = ddim_timesteps(schedule.T, n_steps);
  const std::size_t batch = z_T.shape()[0];
  ad::Var z = z_T;
  for (std::size_t k = 0; k + 1 < taus.size(); ++k) {
    const std::vector<std::size_t> t(batch, taus[k]);
    z = ddim_step(z, taus[k], taus[k + 1], eps(z, t), schedule);
  }
  return z;
}

ad::Var decode_scaled(const ad::BoundParams& vae, const VaeConfig& config, ad::Var z_scaled, double latent_scale) {
  return decode(vae, config, latent_scale == 1.0 ? z_scaled : ad::scale(z_scaled, 1.0 / latent_scale));
}

}  // namespace lf::prior
