#include "latentflow/metrics/distribution.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lf::metrics {

namespace {

std::size_t check_set(const std::vector<Embedding>& set, const char* what, std::size_t min_size) {
  if (set.size() < min_size)
    throw std::invalid_argument(std::string(what) + ": need at least " + std::to_string(min_size) + " embeddings, got " +
                                std::to_string(set.size()));
  const std::size_t d = set.front().size();
  if (d == 0) throw std::invalid_argument(std::string(what) + ": empty embedding");
  for (const auto& e : set)
    if (e.size() != d) throw std::invalid_argument(std::string(what) + ": embeddings have mixed dimensions");
  return d;
}

Eigen::MatrixXd as_matrix(const std::vector<Embedding>& set) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(set.size()), static_cast<Eigen::Index>(set.front().size()));
  for (std::size_t r = 0; r < set.size(); ++r)
    for (std::size_t c = 0; c < set[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = set[r][c];
  return m;
}

// Symmetric PSD square root; small negative eigenvalues from rounding are clamped.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sym, double* trace_of_sqrt = nullptr) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("fid: eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev[k] < -1e-10 * scale)
      throw std::runtime_error("fid: matrix is not positive semidefinite (eigenvalue " + std::to_string(ev[k]) + ")");
    ev[k] = std::sqrt(std::max(ev[k], 0.0));
  }
  if (trace_of_sqrt) *trace_of_sqrt = ev.sum();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double fid(const std::vector<Embedding>& real, const std::vector<Embedding>& gen, const FidOptions& options) {
  const std::size_t d = check_set(real, "fid", 2);
  if (check_set(gen, "fid", 2) != d) throw std::invalid_argument("fid: embedding dimensions differ");
  if (options.shrinkage < 0.0 || options.shrinkage > 1.0) throw std::invalid_argument("fid: shrinkage must lie in [0, 1]");
  if (options.shrinkage == 0.0 && (real.size() < d + 1 || gen.size() < d + 1))
    throw std::invalid_argument("fid: covariance is rank-deficient (" + std::to_string(std::min(real.size(), gen.size())) +
                                " samples for dimension " + std::to_string(d) + "); enable shrinkage");
  auto stats = [&](const std::vector<Embedding>& set) {
    const Eigen::MatrixXd x = as_matrix(set);
    const Eigen::VectorXd mu = x.colwise().mean().transpose();
    const Eigen::MatrixXd c = x.rowwise() - mu.transpose();
    Eigen::MatrixXd cov = (c.transpose() * c) / static_cast<double>(set.size() - 1);
    if (options.shrinkage > 0.0) {
      const double t = cov.trace() / static_cast<double>(d);
      cov *= 1.0 - options.shrinkage;
      cov.diagonal().array() += options.shrinkage * t;
    }
    return std::pair{mu, cov};
  };
  const auto [mu1, s1] = stats(real);
  const auto [mu2, s2] = stats(gen);
  const Eigen::MatrixXd r1 = psd_sqrt(0.5 * (s1 + s1.transpose()));
  const Eigen::MatrixXd b = r1 * s2 * r1;
  double tr_sqrt = 0.0;
  psd_sqrt(0.5 * (b + b.transpose()), &tr_sqrt);
  return (mu1 - mu2).squaredNorm() + s1.trace() + s2.trace() - 2.0 * tr_sqrt;
}

double kid_kernel(const Embedding& u, const Embedding& v) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  const double t = s / static_cast<double>(u.size()) + 1.0;
  return t * t * t;
}

namespace {

struct KidSums {
  double xx = 0.0, yy = 0.0, xy = 0.0;
};

// Row r of each of the three sums, with columns visited in ascending order.
KidSums kid_row(const std::vector<Embedding>& x, const std::vector<Embedding>& y, std::size_t r) {
  KidSums s;
  if (r < x.size()) {
    for (std::size_t c = 0; c < x.size(); ++c)
      if (c != r) s.xx += kid_kernel(x[r], x[c]);
    for (std::size_t c = 0; c < y.size(); ++c) s.xy += kid_kernel(x[r], y[c]);
  }
  if (r < y.size())
    for (std::size_t c = 0; c < y.size(); ++c)
      if (c != r) s.yy += kid_kernel(y[r], y[c]);
  return s;
}

double kid_combine(const std::vector<KidSums>& rows, std::size_t m, std::size_t n) {
  KidSums t;
  for (const auto& r : rows) {
    t.xx += r.xx;
    t.yy += r.yy;
    t.xy += r.xy;
  }
  const double md = static_cast<double>(m), nd = static_cast<double>(n);
  return t.xx / (md * (md - 1.0)) + t.yy / (nd * (nd - 1.0)) - 2.0 * t.xy / (md * nd);
}

void kid_check(const std::vector<Embedding>& x, const std::vector<Embedding>& y) {
  const std::size_t d = check_set(x, "kid", 2);
  if (check_set(y, "kid", 2) != d) throw std::invalid_argument("kid: embedding dimensions differ");
}

}  // namespace

double kid(const std::vector<Embedding>& x, const std::vector<Embedding>& y) {
  kid_check(x, y);
  const std::size_t rows = std::max(x.size(), y.size());
  std::vector<KidSums> partial(rows);
  const auto nrows = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < nrows; ++r) partial[static_cast<std::size_t>(r)] = kid_row(x, y, static_cast<std::size_t>(r));
  return kid_combine(partial, x.size(), y.size());
}

namespace serial {

double kid(const std::vector<Embedding>& x, const std::vector<Embedding>& y) {
  kid_check(x, y);
  const std::size_t rows = std::max(x.size(), y.size());
  std::vector<KidSums> partial;
  partial.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) partial.push_back(kid_row(x, y, r));
  return kid_combine(partial, x.size(), y.size());
}

}  // namespace serial

}  // namespace lf::metrics
