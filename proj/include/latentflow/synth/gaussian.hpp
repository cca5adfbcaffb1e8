#pragma once

#include <cstdint>
#include <vector>

#include "latentflow/fvm/field.hpp"

namespace lf::synth {

/// Spectral Gaussian random field. Wavenumbers are integer cycles per domain, so the filter is
/// S(k) = exp(-0.5 |k|^2 lambda^2) with |k|^2 = kx^2 + ky^2.
struct GrfParams {
  double correlation_length = 0.4;
  fvm::GridSpec grid{};
  std::uint64_t seed = 0;
};

/// The seven correlation lengths 0.1, 0.2, ..., 0.7 used to populate Gaussian datasets.
const std::vector<double>& default_correlation_lengths();

/// Y = Re IDFT(sqrt(S) * DFT(xi)), standardized to zero mean and unit (population) variance.
fvm::ScalarField2D gaussian_log_field(const GrfParams& params);

/// Standardized Y clipped to [-3, 3], exponentiated, then min-max normalized to [0, 1].
fvm::ScalarField2D gaussian_field(const GrfParams& params);

/// Matern covariance sigma^2 (sqrt(2 nu) r / l)^nu K_nu(sqrt(2 nu) r / l) 2^(1-nu)/Gamma(nu); only nu = 1.
double matern_covariance(double r, double length, double nu = 1.0, double variance = 1.0);

/// Zero-mean stationary Matern field by spectral synthesis on a grid padded by `pad` in each
/// direction (cropped back), with the discrete spectrum normalized to the requested variance.
fvm::ScalarField2D matern_gaussian_process(double length, double nu, const fvm::GridSpec& grid, std::uint64_t seed,
                                           double variance = 1.0, std::size_t pad = 4);

/// Mean absolute difference between neighbouring cells (both directions).
double total_variation(const fvm::ScalarField2D& f);

}  // namespace lf::synth
