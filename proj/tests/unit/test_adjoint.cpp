#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "latentflow/adjoint/adjoint.hpp"
#include "latentflow/fvm/solver.hpp"
#include "support.hpp"

using namespace lf;
using namespace lf::adjoint;
using fvm::ScalarField2D;

namespace {

struct Obs {
  std::size_t p;
  double value;
};

std::vector<Obs> random_obs(const ScalarField2D& K, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Obs> obs;
  std::vector<bool> used(K.size());
  while (obs.size() < count) {
    const std::size_t p = rng.index(K.size());
    if (used[p]) continue;
    used[p] = true;
    obs.push_back({p, rng.uniform()});
  }
  return obs;
}

double misfit(const ScalarField2D& K, const std::vector<Obs>& obs) {
  const auto h = fvm::solve_head(fvm::assemble_system(K, {}));
  double s = 0.0;
  for (const auto& o : obs) s += (o.value - h[o.p]) * (o.value - h[o.p]);
  return s;
}

ScalarField2D misfit_cotangent(const ScalarField2D& h, const std::vector<Obs>& obs) {
  auto r = h.with_values(std::vector<double>(h.size(), 0.0));
  for (const auto& o : obs) r[o.p] = 2.0 * (h[o.p] - o.value);
  return r;
}

// Central differences of the misfit. Each perturbed head is h0 plus a correction solved from the
// residual of h0, and the misfit difference is expanded so nothing O(1) cancels.
std::vector<double> fd_gradient(ScalarField2D K, const std::vector<Obs>& obs, double rel_step) {
  const auto h0 = fvm::solve_head(fvm::assemble_system(K, {}));
  auto correction = [&](const ScalarField2D& Kp) {
    auto sys = fvm::assemble_system(Kp, {});
    const auto Ah = fvm::multiply(sys, h0.storage());
    for (std::size_t r = 0; r < sys.rhs.size(); ++r) sys.rhs[r] -= Ah[r];
    return fvm::solve_head(sys);
  };
  std::vector<double> g(K.size());
  for (std::size_t p = 0; p < K.size(); ++p) {
    const double k0 = K[p], step = rel_step * k0;
    K[p] = k0 + step;
    const auto dp = correction(K);
    K[p] = k0 - step;
    const auto dm = correction(K);
    K[p] = k0;
    double diff = 0.0;
    for (const auto& o : obs) diff += (dp[o.p] - dm[o.p]) * (2.0 * (h0[o.p] - o.value) + dp[o.p] + dm[o.p]);
    g[p] = diff / (2 * step);
  }
  return g;
}

}  // namespace

TEST_CASE("zero right-hand side gives a zero adjoint and zero gradient") {
  const auto K = test::random_conductivity(8, 8, 1);
  const auto sys = fvm::assemble_system(K, {});
  const auto h = fvm::solve_head(sys);
  const auto st = solve_adjoint(sys, K.with_values(std::vector<double>(64, 0.0)));
  for (double v : st.lambda.values()) CHECK(v == 0.0);
  for (double v : conductivity_gradient(st, h, K, {}).values()) CHECK(v == 0.0);
}

TEST_CASE("adjoint solve agrees with the forward solve and a dense transpose solve") {
  const auto K = test::random_conductivity(8, 8, 2);
  const auto sys = fvm::assemble_system(K, {});
  const fvm::Factorization fac(sys);

  auto r = K.with_values(std::vector<double>(64, 0.0));
  r(3, 4) = 1.0;
  const auto lam = solve_adjoint(fac, r).lambda;
  const auto fwd = fac.solve(r.values());
  for (std::size_t p = 0; p < 64; ++p) CHECK(lam[p] == doctest::Approx(fwd[p]).epsilon(1e-12));

  Rng rng(5);
  for (double& v : r.values()) v = rng.normal();
  Eigen::MatrixXd A(64, 64);
  Eigen::VectorXd rv(64);
  for (std::size_t i = 0; i < 64; ++i) {
    rv[static_cast<Eigen::Index>(i)] = r[i];
    for (std::size_t j = 0; j < 64; ++j) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sys.at(i, j);
  }
  const Eigen::VectorXd dense = A.transpose().partialPivLu().solve(rv);
  const auto st = solve_adjoint(sys, r);
  for (std::size_t p = 0; p < 64; ++p)
    CHECK(st.lambda[p] == doctest::Approx(dense[static_cast<Eigen::Index>(p)]).epsilon(1e-10));
  const auto Atl = fvm::multiply_transpose(sys, st.lambda.values());
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < 64; ++p) {
    num += (Atl[p] - r[p]) * (Atl[p] - r[p]);
    den += r[p] * r[p];
  }
  CHECK(std::sqrt(num / den) < 1e-10);
}

TEST_CASE("adjoint gradient matches central finite differences on 16x16") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto K = test::random_conductivity(16, 16, 100 + seed);
    const auto obs = random_obs(K, 9, 200 + seed);
    const auto h = fvm::solve_head(fvm::assemble_system(K, {}));
    const auto g = solver_vjp(K, misfit_cotangent(h, obs));
    const auto fd = fd_gradient(K, obs, 1e-6);
    double scale = 0.0;
    for (double v : fd) scale = std::max(scale, std::abs(v));
    std::size_t good = 0;
    double worst = 0.0;
    for (std::size_t p = 0; p < fd.size(); ++p) {
      // Components many orders below the largest are dominated by FD round-off.
      const double e = test::rel_err(g[p], fd[p], 1e-6 * scale);
      worst = std::max(worst, e);
      if (e < 1e-5) ++good;
    }
    CAPTURE(seed);
    CHECK(static_cast<double>(good) >= 0.99 * static_cast<double>(fd.size()));
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("dot-product test") {
  const auto K = test::random_conductivity(20, 14, 7);
  const auto obs = random_obs(K, 15, 8);
  const auto h = fvm::solve_head(fvm::assemble_system(K, {}));
  const auto g = solver_vjp(K, misfit_cotangent(h, obs));
  Rng rng(9);
  auto dK = K;
  for (std::size_t p = 0; p < K.size(); ++p) dK[p] = K[p] * rng.normal();
  const double eps = 1e-6;
  auto Kp = K, Km = K;
  for (std::size_t p = 0; p < K.size(); ++p) {
    Kp[p] += eps * dK[p];
    Km[p] -= eps * dK[p];
  }
  const double directional = (misfit(Kp, obs) - misfit(Km, obs)) / (2 * eps);
  CHECK(test::rel_err(test::dot(g.storage(), dK.storage()), directional) < 1e-6);
}

TEST_CASE("single-cell head: VJP is a column of the finite-difference Jacobian") {
  const auto K = test::random_conductivity(10, 8, 11);
  const std::size_t q = 8 * 10 / 2 + 3;
  auto cot = K.with_values(std::vector<double>(K.size(), 0.0));
  cot[q] = 1.0;
  const auto g = solver_vjp(K, cot);
  for (std::size_t p = 0; p < K.size(); p += 7) {
    auto Kp = K, Km = K;
    const double step = 1e-6 * K[p];
    Kp[p] += step;
    Km[p] -= step;
    const double fd = (fvm::solve_head(fvm::assemble_system(Kp, {}))[q] - fvm::solve_head(fvm::assemble_system(Km, {}))[q]) /
                      (2 * step);
    CHECK(test::rel_err(g[p], fd, 1e-9) < 1e-5);
  }
}

TEST_CASE("VJP linearity, zero cotangent and cache reuse") {
  const auto K = test::random_conductivity(12, 12, 13);
  DifferentiableDarcy darcy;
  CHECK_FALSE(darcy.has_state());
  CHECK_THROWS_AS(darcy.vjp(K, K), std::logic_error);
  darcy.forward(K);
  auto r = K;
  Rng rng(14);
  for (double& v : r.values()) v = rng.normal();
  const auto g1 = darcy.vjp(K, r);
  auto r3 = r;
  for (double& v : r3.values()) v *= 3.0;
  const auto g3 = darcy.vjp(K, r3);
  for (std::size_t p = 0; p < K.size(); ++p) CHECK(std::abs(g3[p] - 3.0 * g1[p]) <= 1e-12 * (1 + std::abs(g3[p])));
  for (double v : darcy.vjp(K, K.with_values(std::vector<double>(K.size(), 0.0))).values()) CHECK(v == 0.0);

  // A fresh factorization produces the same bits.
  CHECK(solver_vjp(K, r).storage() == g1.storage());

  auto other = K;
  other[5] *= 1.0 + 1e-15;
  CHECK_THROWS_AS(darcy.vjp(other, r), std::logic_error);
}

TEST_CASE("mirror-symmetric observations on homogeneous K give a mirror-symmetric gradient") {
  const std::size_t nx = 12, ny = 10;
  const auto K = fvm::GridSpec{nx, ny}.field(1.0);
  const auto h = fvm::solve_head(fvm::assemble_system(K, {}));
  auto cot = K.with_values(std::vector<double>(K.size(), 0.0));
  for (std::size_t i : {2, 5, 9}) {
    cot(i, 2) = 0.3 * static_cast<double>(i);
    cot(i, ny - 1 - 2) = 0.3 * static_cast<double>(i);
  }
  const auto g = solver_vjp(K, cot);
  double scale = 0.0;
  for (double v : g.values()) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) CHECK(std::abs(g(i, j) - g(i, ny - 1 - j)) <= 1e-12 * scale);
}

TEST_CASE("gathered and scattered gradients agree") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto K = test::random_conductivity(17, 11, 30 + seed, 1e-3, 1e3);
    const auto sys = fvm::assemble_system(K, {0.4, 1.3});
    const auto h = fvm::solve_head(sys);
    auto r = K;
    Rng rng(seed);
    for (double& v : r.values()) v = rng.normal();
    const auto st = solve_adjoint(sys, r);
    const auto a = conductivity_gradient(st, h, K, {0.4, 1.3});
    const auto b = serial::conductivity_gradient(st, h, K, {0.4, 1.3});
    CHECK(test::max_rel_err(a.storage(), b.storage(), 1e-300) < 1e-12);
  }
}
