#pragma once

#include <cstddef>
#include <vector>

#include "latentflow/ad/tape.hpp"
#include "latentflow/ad/tensor.hpp"

namespace lf::prior {

/// beta, alpha and alpha_bar for t = 1..T, stored at index t - 1. alpha_bar(0) is defined as 1.
struct NoiseSchedule {
  std::size_t T = 0;
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;

  double beta_at(std::size_t t) const;
  double alpha_at(std::size_t t) const;
  double alpha_bar_at(std::size_t t) const;
};

/// Linear beta ramp from beta_start (t = 1) to beta_end (t = T).
NoiseSchedule make_schedule(std::size_t T, double beta_start = 1e-4, double beta_end = 2e-2);

/// z_t = sqrt(abar_t) z0 + sqrt(1 - abar_t) eps, 1 <= t <= T.
ad::Tensor forward_diffuse(const ad::Tensor& z0, std::size_t t, const ad::Tensor& eps, const NoiseSchedule& s);

/// One Markov transition z_t = sqrt(alpha_t) z_{t-1} + sqrt(beta_t) eps.
ad::Tensor diffuse_one_step(const ad::Tensor& z_prev, std::size_t t, const ad::Tensor& eps, const NoiseSchedule& s);

/// z_prev = a z_t + b eps_pred, the deterministic DDIM update written as a linear combination.
struct DdimCoefficients {
  double a = 1.0;
  double b = 0.0;
};
DdimCoefficients ddim_coefficients(std::size_t t, std::size_t t_prev, const NoiseSchedule& s);

ad::Tensor ddim_step(const ad::Tensor& z_t, std::size_t t, std::size_t t_prev, const ad::Tensor& eps_pred,
                     const NoiseSchedule& s);
ad::Var ddim_step(ad::Var z_t, std::size_t t, std::size_t t_prev, ad::Var eps_pred, const NoiseSchedule& s);

/// Strided timesteps T = tau_0 > tau_1 > ... > tau_n = 0 for an n-step DDIM chain.
std::vector<std::size_t> ddim_timesteps(std::size_t T, std::size_t n_steps);

}  // namespace lf::prior
