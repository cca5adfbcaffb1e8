#include "latentflow/synth/bimaterial.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "latentflow/common/rng.hpp"
#include "latentflow/synth/gaussian.hpp"

namespace lf::synth {

BimaterialSample bimaterial_sample(const BimaterialParams& params) {
  double p = params.threshold_p;
  if (std::isnan(p)) p = Rng(params.seed, "bimaterial.threshold").uniform();
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bimaterial: threshold_p must lie in [0, 1]");

  const auto& g = params.grid;
  const double var = params.matern_sigma * params.matern_sigma;
  const auto phi1 = matern_gaussian_process(params.matern_length, params.matern_nu, g,
                                            derive_seed(params.seed, "bimaterial.phi1"), var);
  const auto phi2 = matern_gaussian_process(params.matern_length, params.matern_nu, g,
                                            derive_seed(params.seed, "bimaterial.phi2"), var);
  const auto split = matern_gaussian_process(params.split_length, params.matern_nu, g,
                                             derive_seed(params.seed, "bimaterial.split"), 1.0);

  const std::size_t n = split.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return split[a] > split[b]; });

  BimaterialSample out;
  out.alpha = threshold_alpha(p);
  const auto n_high = static_cast<std::size_t>(std::llround((1.0 - out.alpha) * static_cast<double>(n)));
  out.high_phase.assign(n, false);
  for (std::size_t r = 0; r < n_high; ++r) out.high_phase[order[r]] = true;

  out.K = g.field();
  for (std::size_t q = 0; q < n; ++q)
    out.K[q] = out.high_phase[q] ? std::exp(params.high_log_mean + phi1[q]) : std::exp(params.low_log_mean + phi2[q]);
  return out;
}

fvm::ScalarField2D bimaterial_field(const BimaterialParams& params) { return bimaterial_sample(params).K; }

}  // namespace lf::synth
