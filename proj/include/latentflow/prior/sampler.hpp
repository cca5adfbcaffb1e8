#pragma once

#include <functional>
#include <vector>

#include "latentflow/ad/ops.hpp"
#include "latentflow/ad/params.hpp"
#include "latentflow/prior/denoiser.hpp"
#include "latentflow/prior/schedule.hpp"
#include "latentflow/prior/vae.hpp"

namespace lf::prior {

/// eps_theta(z_t, t); lets tests substitute oracle predictors for the network.
using NoisePredictor = std::function<ad::Var(ad::Var z_t, const std::vector<std::size_t>& t)>;

NoisePredictor network_predictor(const ad::BoundParams& params, const DenoiserConfig& config);

/// Chained DDIM updates over ddim_timesteps(T, n_steps); returns z_0. Differentiable in z_T.
ad::Var ddim_chain(const NoisePredictor& eps, ad::Var z_T, const NoiseSchedule& schedule, std::size_t n_steps);

/// Decoder applied to a diffusion-space latent: decode(z / latent_scale).
ad::Var decode_scaled(const ad::BoundParams& vae, const VaeConfig& config, ad::Var z_scaled, double latent_scale);

}  // namespace lf::prior
