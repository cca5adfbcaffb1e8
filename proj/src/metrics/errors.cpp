#include "latentflow/metrics/errors.hpp"

#include <cmath>
#include <stdexcept>

#include "latentflow/metrics/ssim.hpp"

namespace lf::metrics {

double relative_l2(const fvm::ScalarField2D& pred, const fvm::ScalarField2D& truth) {
  fvm::require_same_grid(pred, truth, "relative_l2");
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < truth.size(); ++p) {
    const double d = pred[p] - truth[p];
    num += d * d;
    den += truth[p] * truth[p];
  }
  if (!(den > 0.0)) throw std::invalid_argument("relative_l2: truth has zero norm");
  return std::sqrt(num / den);
}

double mean_corrected_relative(const fvm::ScalarField2D& pred, const fvm::ScalarField2D& truth) {
  fvm::require_same_grid(pred, truth, "mean_corrected_relative");
  const double mu = truth.mean();
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < truth.size(); ++p) {
    const double d = pred[p] - truth[p];
    num += d * d;
    den += (truth[p] - mu) * (truth[p] - mu);
  }
  if (!(den > 0.0)) throw std::invalid_argument("mean_corrected_relative: truth is constant");
  return std::sqrt(num / den);
}

fvm::ScalarField2D log_field(const fvm::ScalarField2D& K) {
  auto out = K;
  for (double& v : out.values()) {
    if (!(v > 0.0)) throw std::invalid_argument("log_field: non-positive conductivity");
    v = std::log(v);
  }
  return out;
}

MetricsBundle evaluate_fields(const fvm::ScalarField2D& K_pred, const fvm::ScalarField2D& K_true,
                              const fvm::ScalarField2D& h_pred, const fvm::ScalarField2D& h_true, bool log_domain) {
  const auto kp = log_domain ? log_field(K_pred) : K_pred;
  const auto kt = log_domain ? log_field(K_true) : K_true;
  MetricsBundle m;
  m.evaluated_in_log = log_domain;
  m.eps_K = relative_l2(kp, kt);
  m.eps_h = relative_l2(h_pred, h_true);
  m.eps_K_tilde = mean_corrected_relative(kp, kt);
  const double range = kt.max() - kt.min();
  m.ssim = ssim(kp, kt, 7, range > 0.0 ? range : 1.0);
  return m;
}

}  // namespace lf::metrics
