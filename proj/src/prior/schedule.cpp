#include "latentflow/prior/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "latentflow/ad/ops.hpp"

namespace lf::prior {

namespace {
void check_t(const NoiseSchedule& s, std::size_t t, bool allow_zero) {
  if (t > s.T || (!allow_zero && t == 0))
    throw std::out_of_range("timestep " + std::to_string(t) + " outside [" + (allow_zero ? "0" : "1") + ", " +
                            std::to_string(s.T) + "]");
}
}  // namespace

double NoiseSchedule::beta_at(std::size_t t) const {
  check_t(*this, t, false);
  return beta[t - 1];
}
double NoiseSchedule::alpha_at(std::size_t t) const {
  check_t(*this, t, false);
  return alpha[t - 1];
}
double NoiseSchedule::alpha_bar_at(std::size_t t) const {
  check_t(*this, t, true);
  return t == 0 ? 1.0 : alpha_bar[t - 1];
}

NoiseSchedule make_schedule(std::size_t T, double beta_start, double beta_end) {
  if (T < 1) throw std::invalid_argument("make_schedule: T must be >= 1");
  if (!(beta_start > 0.0 && beta_end < 1.0 && beta_start <= beta_end))
    throw std::invalid_argument("make_schedule: need 0 < beta_start <= beta_end < 1");
  NoiseSchedule s;
  s.T = T;
  s.beta.resize(T);
  s.alpha.resize(T);
  s.alpha_bar.resize(T);
  double prod = 1.0;
  for (std::size_t k = 0; k < T; ++k) {
    const double frac = T == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(T - 1);
    s.beta[k] = beta_start + frac * (beta_end - beta_start);
    s.alpha[k] = 1.0 - s.beta[k];
    prod *= s.alpha[k];
    s.alpha_bar[k] = prod;
  }
  return s;
}

ad::Tensor forward_diffuse(const ad::Tensor& z0, std::size_t t, const ad::Tensor& eps, const NoiseSchedule& s) {
  if (z0.shape() != eps.shape()) throw std::invalid_argument("forward_diffuse: z0 and eps shapes differ");
  const double ab = s.alpha_bar_at(t);
  if (t == 0) throw std::out_of_range("forward_diffuse: t must be >= 1");
  const double a = std::sqrt(ab), b = std::sqrt(1.0 - ab);
  ad::Tensor out(z0.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * z0[i] + b * eps[i];
  return out;
}

ad::Tensor diffuse_one_step(const ad::Tensor& z_prev, std::size_t t, const ad::Tensor& eps, const NoiseSchedule& s) {
  if (z_prev.shape() != eps.shape()) throw std::invalid_argument("diffuse_one_step: shapes differ");
  const double a = std::sqrt(s.alpha_at(t)), b = std::sqrt(s.beta_at(t));
  ad::Tensor out(z_prev.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * z_prev[i] + b * eps[i];
  return out;
}

DdimCoefficients ddim_coefficients(std::size_t t, std::size_t t_prev, const NoiseSchedule& s) {
  if (!(t > t_prev)) throw std::invalid_argument("ddim_step: need t > t_prev, got " + std::to_string(t) + " -> " +
                                                  std::to_string(t_prev));
  const double ab_t = s.alpha_bar_at(t), ab_p = s.alpha_bar_at(t_prev);
  const double ratio = std::sqrt(ab_p) / std::sqrt(ab_t);
  return {ratio, std::sqrt(1.0 - ab_p) - ratio * std::sqrt(1.0 - ab_t)};
}

ad::Tensor ddim_step(const ad::Tensor& z_t, std::size_t t, std::size_t t_prev, const ad::Tensor& eps_pred,
                     const NoiseSchedule& s) {
  if (z_t.shape() != eps_pred.shape()) throw std::invalid_argument("ddim_step: z_t and eps_pred shapes differ");
  const auto c = ddim_coefficients(t, t_prev, s);
  ad::Tensor out(z_t.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c.a * z_t[i] + c.b * eps_pred[i];
  return out;
}

ad::Var ddim_step(ad::Var z_t, std::size_t t, std::size_t t_prev, ad::Var eps_pred, const NoiseSchedule& s) {
  const auto c = ddim_coefficients(t, t_prev, s);
  return ad::add(ad::scale(z_t, c.a), ad::scale(eps_pred, c.b));
}

std::vector<std::size_t> ddim_timesteps(std::size_t T, std::size_t n_steps) {
  if (n_steps < 1 || n_steps > T)
    throw std::invalid_argument("ddim_timesteps: need 1 <= n_steps <= T, got " + std::to_string(n_steps));
  std::vector<std::size_t> taus(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k) taus[k] = (T * (n_steps - k)) / n_steps;
  return taus;
}

}  // namespace lf::prior
