#include "latentflow/fvm/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>
#include <cstdio>
#include <optional>

namespace lf::fvm {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::string fmt_residual(double r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", r);
  return buf;
}

}  // namespace

struct Factorization::Impl {
  std::optional<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt;
  std::vector<double> inv_diag;  // Jacobi preconditioner for -A
};

Factorization::Factorization(SparseLinearSystem system, const SolverOptions& options)
    : system_(std::move(system)), options_(options), impl_(std::make_unique<Impl>()) {
  const std::size_t n = system_.n();
  if (n == 0 || system_.row_ptr.size() != n + 1) throw std::invalid_argument("Factorization: malformed system");
  const bool direct = options_.method == SolverMethod::Direct ||
                      (options_.method == SolverMethod::Auto && n <= options_.direct_limit);
  if (direct) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(system_.nnz());
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t k = system_.row_ptr[p]; k < system_.row_ptr[p + 1]; ++k)
        trip.emplace_back(static_cast<int>(p), static_cast<int>(system_.col_idx[k]), -system_.vals[k]);
    Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(trip.begin(), trip.end());
    impl_->llt.emplace();
    impl_->llt->compute(m);
    if (impl_->llt->info() != Eigen::Success)
      throw SolverError("Factorization: Cholesky of -A failed (matrix not SPD)", NAN);
  } else {
    impl_->inv_diag.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      const double d = -system_.at(p, p);
      if (!(d > 0.0)) throw SolverError("Factorization: non-positive diagonal in -A", NAN);
      impl_->inv_diag[p] = 1.0 / d;
    }
  }
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

bool Factorization::is_direct() const { return impl_->llt.has_value(); }

std::vector<double> Factorization::raw_solve(std::span<const double> b) const {
  const std::size_t n = system_.n();
  if (b.size() != n) throw std::invalid_argument("Factorization::solve: rhs length mismatch");
  // Solve (-A) x = -b.
  if (impl_->llt) {
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t p = 0; p < n; ++p) rhs[static_cast<Eigen::Index>(p)] = -b[p];
    const Eigen::VectorXd x = impl_->llt->solve(rhs);
    return std::vector<double>(x.data(), x.data() + n);
  }

  // Jacobi-preconditioned conjugate gradient on -A.
  std::vector<double> x(n, 0.0), r(n), z(n), d(n);
  for (std::size_t p = 0; p < n; ++p) r[p] = -b[p];
  const double r0 = norm2(r);
  if (r0 == 0.0) return x;
  for (std::size_t p = 0; p < n; ++p) z[p] = impl_->inv_diag[p] * r[p];
  d = z;
  double rz = dot(r, z);
  const std::size_t max_it = options_.max_cg_iterations ? options_.max_cg_iterations : 10 * n;
  for (std::size_t it = 0; it < max_it; ++it) {
    auto q = multiply(system_, d);
    for (double& v : q) v = -v;
    const double alpha = rz / dot(d, q);
    for (std::size_t p = 0; p < n; ++p) {
      x[p] += alpha * d[p];
      r[p] -= alpha * q[p];
    }
    if (norm2(r) <= options_.cg_tolerance * r0) break;
    for (std::size_t p = 0; p < n; ++p) z[p] = impl_->inv_diag[p] * r[p];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t p = 0; p < n; ++p) d[p] = z[p] + beta * d[p];
  }
  return x;
}

std::vector<double> Factorization::solve(std::span<const double> b) const {
  auto x = raw_solve(b);
  double res = relative_residual(system_, x, b);
  // Iterative refinement recovers digits lost to high conductivity contrast.
  for (int step = 0; step < options_.refinement_steps && res > 1e-3 * options_.residual_tolerance; ++step) {
    const auto ax = multiply(system_, x);
    std::vector<double> r(b.size());
    for (std::size_t p = 0; p < r.size(); ++p) r[p] = b[p] - ax[p];
    const auto dx = raw_solve(r);
    std::vector<double> cand(x);
    for (std::size_t p = 0; p < cand.size(); ++p) cand[p] += dx[p];
    const double cres = relative_residual(system_, cand, b);
    if (!(cres < res)) break;
    x = std::move(cand);
    res = cres;
  }
  if (!(res < options_.residual_tolerance))
    throw SolverError("solve: relative residual " + fmt_residual(res) + " exceeds tolerance " +
                          fmt_residual(options_.residual_tolerance),
                      res);
  return x;
}

std::vector<double> Factorization::solve_transpose(std::span<const double> b) const {
  auto x = solve(b);
  const auto atx = multiply_transpose(system_, x);
  double num = 0.0;
  for (std::size_t p = 0; p < atx.size(); ++p) num += (atx[p] - b[p]) * (atx[p] - b[p]);
  const double res = std::sqrt(num) / std::max(norm2(b), 1e-300);
  if (!(res < options_.residual_tolerance))
    throw SolverError("solve_transpose: relative residual " + fmt_residual(res) + " exceeds tolerance", res);
  return x;
}

ScalarField2D solve_head(const Factorization& factorization) {
  const auto& sys = factorization.system();
  return ScalarField2D(sys.nx, sys.ny, sys.dx, sys.dy, factorization.solve(sys.rhs));
}

ScalarField2D solve_head(const SparseLinearSystem& system, const SolverOptions& options) {
  return solve_head(Factorization(system, options));
}

}  // namespace lf::fvm
