#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "latentflow/ad/tensor.hpp"
#include "latentflow/common/rng.hpp"
#include "latentflow/fvm/field.hpp"

namespace lf::test {

inline ad::Tensor random_tensor(ad::Shape shape, std::uint64_t seed, double scale = 1.0) {
  ad::Tensor t(std::move(shape));
  Rng rng(seed);
  for (double& v : t.values()) v = scale * rng.normal();
  return t;
}

inline fvm::ScalarField2D random_conductivity(std::size_t nx, std::size_t ny, std::uint64_t seed, double lo = 0.5,
                                              double hi = 2.0) {
  auto K = fvm::GridSpec{nx, ny}.field();
  Rng rng(seed);
  for (double& v : K.values()) v = lo + (hi - lo) * rng.uniform();
  return K;
}

/// Central difference of f along every coordinate of x.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double step, bool relative_step = false) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double x0 = x[k];
    const double hk = relative_step ? step * std::max(std::abs(x0), 1e-3) : step;
    x[k] = x0 + hk;
    const double fp = f(x);
    x[k] = x0 - hk;
    const double fm = f(x);
    x[k] = x0;
    g[k] = (fp - fm) / (2.0 * hk);
  }
  return g;
}

/// |a - b| / max(|a|, |b|, floor).
inline double rel_err(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double max_rel_err(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-8) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, rel_err(a[k], b[k], floor));
  return m;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace lf::test
