#include "latentflow/synth/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "latentflow/common/rng.hpp"
#include "latentflow/synth/spectral.hpp"

namespace lf::synth {

const std::vector<double>& default_correlation_lengths() {
  static const std::vector<double> values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  return values;
}

namespace {

std::vector<Complex> complex_white_noise(std::size_t n, Rng& rng) {
  std::vector<Complex> xi(n);
  for (auto& c : xi) {
    const double re = rng.normal();
    const double im = rng.normal();
    c = {re, im};
  }
  return xi;
}

}  // namespace

fvm::ScalarField2D gaussian_log_field(const GrfParams& params) {
  if (!(params.correlation_length > 0.0))
    throw std::invalid_argument("gaussian_field: correlation length must be positive, got " +
                                std::to_string(params.correlation_length));
  const std::size_t nx = params.grid.nx, ny = params.grid.ny;
  Rng rng(params.seed);
  auto spec = complex_white_noise(nx * ny, rng);
  fft2d(spec, nx, ny, FftDirection::Forward);
  const double l2 = params.correlation_length * params.correlation_length;
  for (std::size_t j = 0; j < ny; ++j) {
    const double ky = signed_frequency(j, ny);
    for (std::size_t i = 0; i < nx; ++i) {
      const double kx = signed_frequency(i, nx);
      spec[j * nx + i] *= std::sqrt(std::exp(-0.5 * (kx * kx + ky * ky) * l2));
    }
  }
  fft2d(spec, nx, ny, FftDirection::Backward);

  std::vector<double> y(nx * ny);
  double mean = 0.0;
  for (std::size_t p = 0; p < y.size(); ++p) mean += (y[p] = spec[p].real());
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double& v : y) {
    v -= mean;
    var += v * v;
  }
  const double sd = std::sqrt(var / static_cast<double>(y.size()));
  if (!(sd > 0.0)) throw std::runtime_error("gaussian_field: degenerate realization");
  for (double& v : y) v /= sd;
  return params.grid.field().with_values(std::move(y));
}

fvm::ScalarField2D gaussian_field(const GrfParams& params) {
  auto f = gaussian_log_field(params);
  for (double& v : f.values()) v = std::exp(std::clamp(v, -3.0, 3.0));
  const double lo = f.min(), hi = f.max();
  for (double& v : f.values()) v = (v - lo) / (hi - lo);
  return f;
}

double matern_covariance(double r, double length, double nu, double variance) {
  if (nu != 1.0) throw std::invalid_argument("matern: only nu = 1 is supported");
  if (!(length > 0.0)) throw std::invalid_argument("matern: length must be positive");
  if (r == 0.0) return variance;
  const double x = std::numbers::sqrt2 * std::abs(r) / length;
  return variance * x * std::cyl_bessel_k(1.0, x);
}

fvm::ScalarField2D matern_gaussian_process(double length, double nu, const fvm::GridSpec& grid, std::uint64_t seed,
                                           double variance, std::size_t pad) {
  if (nu != 1.0) throw std::invalid_argument("matern_gaussian_process: only nu = 1 is supported, got " +
                                             std::to_string(nu));
  if (!(length > 0.0)) throw std::invalid_argument("matern_gaussian_process: length must be positive");
  if (pad < 1) throw std::invalid_argument("matern_gaussian_process: pad must be >= 1");
  const std::size_t nx = grid.nx * pad, ny = grid.ny * pad;
  const double lx = static_cast<double>(nx) * grid.dx(), ly = static_cast<double>(ny) * grid.dy();
  // 2-D Matern spectral density with nu = 1: S(f) ~ (2/l^2 + 4 pi^2 |f|^2)^-2.
  const double kappa2 = 2.0 / (length * length);
  const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  std::vector<double> weight(nx * ny);
  double total = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    const double fy = signed_frequency(j, ny) / ly;
    for (std::size_t i = 0; i < nx; ++i) {
      const double fx = signed_frequency(i, nx) / lx;
      const double s = 1.0 / std::pow(kappa2 + four_pi2 * (fx * fx + fy * fy), 2.0);
      weight[j * nx + i] = s;
      total += s;
    }
  }
  Rng rng(seed);
  auto spec = complex_white_noise(nx * ny, rng);
  for (std::size_t p = 0; p < spec.size(); ++p) spec[p] *= std::sqrt(variance * weight[p] / total);
  fft2d(spec, nx, ny, FftDirection::Backward);

  auto out = grid.field();
  for (std::size_t j = 0; j < grid.ny; ++j)
    for (std::size_t i = 0; i < grid.nx; ++i) out(i, j) = spec[j * nx + i].real();
  return out;
}

double total_variation(const fvm::ScalarField2D& f) {
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < f.ny(); ++j)
    for (std::size_t i = 0; i < f.nx(); ++i) {
      if (i + 1 < f.nx()) {
        s += std::abs(f(i + 1, j) - f(i, j));
        ++count;
      }
      if (j + 1 < f.ny()) {
        s += std::abs(f(i, j + 1) - f(i, j));
        ++count;
      }
    }
  return count ? s / static_cast<double>(count) : 0.0;
}

}  // namespace lf::synth
