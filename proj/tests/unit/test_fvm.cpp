#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "latentflow/fvm/assembly.hpp"
#include "latentflow/fvm/field_io.hpp"
#include "latentflow/fvm/solver.hpp"
#include "latentflow/fvm/velocity.hpp"
#include "support.hpp"

using namespace lf;
using namespace lf::fvm;

namespace {

GridSpec unit_grid(std::size_t nx, std::size_t ny) {
  return GridSpec{nx, ny, 0.0, static_cast<double>(nx), 0.0, static_cast<double>(ny)};
}

double max_abs_diff(const ScalarField2D& a, const ScalarField2D& b) {
  double m = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) m = std::max(m, std::abs(a[p] - b[p]));
  return m;
}

bool touches_dirichlet(const SparseLinearSystem& s, std::size_t r) {
  const std::size_t i = r % s.nx;
  return i == 0 || i + 1 == s.nx;
}

}  // namespace

TEST_CASE("harmonic face conductivity") {
  CHECK(harmonic_face_conductivity(2, 2) == 2.0);
  CHECK(harmonic_face_conductivity(1, 3) == 1.5);
  // 2e-13 / 1.001e-5
  CHECK(harmonic_face_conductivity(1e-5, 1e-8) == doctest::Approx(1.998001998001998e-8).epsilon(1e-14));
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const double a = std::exp(5 * rng.normal()), b = std::exp(5 * rng.normal());
    const double h = harmonic_face_conductivity(a, b);
    CHECK(h <= 2.0 * std::min(a, b) * (1 + 1e-15));
    CHECK(h == harmonic_face_conductivity(b, a));
  }
  CHECK_THROWS(harmonic_face_conductivity(0.0, 1.0));
  CHECK_THROWS(harmonic_face_conductivity(1.0, -2.0));
}

TEST_CASE("five-point stencil on a homogeneous grid") {
  const auto sys = assemble_system(unit_grid(5, 4).field(1.0), {});
  const std::size_t r = 1 * 5 + 2;  // interior cell (2, 1)
  CHECK(sys.at(r, r) == -4.0);
  CHECK(sys.at(r, r - 1) == 1.0);
  CHECK(sys.at(r, r + 1) == 1.0);
  CHECK(sys.at(r, r - 5) == 1.0);
  CHECK(sys.at(r, r + 5) == 1.0);
  CHECK(sys.rhs[r] == 0.0);
}

TEST_CASE("2x2 system written out by hand") {
  const auto sys = assemble_system(unit_grid(2, 2).field(1.0), {1.0, 0.0});
  // Each cell: one x-neighbour, one y-neighbour (other y-face no-flux) and a ghost face 2K dy/dx.
  const double A[4][4] = {{-4, 1, 1, 0}, {1, -4, 0, 1}, {1, 0, -4, 1}, {0, 1, 1, -4}};
  const double b[4] = {-2, 0, -2, 0};
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) CHECK(sys.at(r, c) == A[r][c]);
    CHECK(sys.rhs[r] == b[r]);
  }
  const auto h = solve_head(sys);
  CHECK(h[0] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(h[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(h[2] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(h[3] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("CSR structure and conservation") {
  const auto K = test::random_conductivity(7, 6, 4, 1e-3, 10.0);
  const auto sys = assemble_system(K, {2.0, -1.0});
  REQUIRE(sys.row_ptr.size() == sys.n() + 1);
  for (std::size_t r = 0; r < sys.n(); ++r) {
    const std::size_t b = sys.row_ptr[r], e = sys.row_ptr[r + 1];
    CHECK(e - b <= 5);
    for (std::size_t k = b + 1; k < e; ++k) CHECK(sys.col_idx[k - 1] < sys.col_idx[k]);
    if (!touches_dirichlet(sys, r)) {
      double s = 0.0, scale = 0.0;
      for (std::size_t k = b; k < e; ++k) {
        s += sys.vals[k];
        scale += std::abs(sys.vals[k]);
      }
      CHECK(std::abs(s) <= 1e-15 * scale);
      CHECK(sys.rhs[r] == 0.0);
    }
    CHECK(sys.at(r, r) < 0.0);
  }
  for (std::size_t r = 0; r < sys.n(); ++r)
    for (std::size_t c = 0; c < sys.n(); ++c) CHECK(sys.at(r, c) == sys.at(c, r));
}

TEST_CASE("row-parallel and face-scatter assembly agree") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto K = test::random_conductivity(9 + seed, 5 + 2 * seed, seed, 1e-8, 1e-5);
    const auto a = assemble_system(K, {1.0, 0.0});
    const auto b = serial::assemble_system(K, {1.0, 0.0});
    CHECK(a.row_ptr == b.row_ptr);
    CHECK(a.col_idx == b.col_idx);
    CHECK(a.rhs == b.rhs);
    CHECK(test::max_rel_err(a.vals, b.vals, 0.0) < 1e-14);
  }
}

TEST_CASE("assembly rejects bad input") {
  auto K = unit_grid(4, 4).field(1.0);
  K(2, 2) = 0.0;
  CHECK_THROWS(assemble_system(K, {}));
  K(2, 2) = NAN;
  CHECK_THROWS(assemble_system(K, {}));
  CHECK_THROWS(assemble_system(unit_grid(1, 4).field(1.0), {}));
}

TEST_CASE("homogeneous K gives the linear head on the 100x100 domain") {
  const GridSpec g;  // [-50, 50]^2, 100 x 100
  const auto h = solve_head(assemble_system(g.field(1.0), {}));
  double err = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) err = std::max(err, std::abs(h(i, j) - (50.0 - g.x_center(i)) / 100.0));
  CHECK(err < 1e-10);
}

TEST_CASE("two slabs in series match the 1-D conductance solution") {
  const GridSpec g{100, 10};
  auto K = g.field(1.0);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = g.nx / 2; i < g.nx; ++i) K(i, j) = 4.0;
  const auto h = solve_head(assemble_system(K, {}));
  // Resistances per unit area: 50/1 on the left, 50/4 on the right.
  const double R1 = 50.0, R2 = 12.5, q = 1.0 / (R1 + R2);
  const double h_interface = R2 / (R1 + R2);
  double err = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double x = g.x_center(i);
      const double exact = x < 0 ? 1.0 - q * (x + 50.0) / 1.0 : h_interface - q * x / 4.0;
      err = std::max(err, std::abs(h(i, j) - exact));
    }
  CHECK(err < 1e-8);

  const auto u = darcy_velocity(K, h, {});
  const double left = u.x_face(g.nx / 2 - 1, 3), right = u.x_face(g.nx / 2 + 1, 3);
  CHECK(std::abs(left - right) < 1e-10);
  CHECK(u.x_face(g.nx / 2, 3) == doctest::Approx(q).epsilon(1e-10));
  // Interface head reconstructed from the last left cell.
  CHECK(h(g.nx / 2 - 1, 3) - u.x_face(g.nx / 2, 3) * 0.5 == doctest::Approx(h_interface).epsilon(1e-10));
}

TEST_CASE("equal Dirichlet values give a constant head") {
  const auto K = test::random_conductivity(12, 9, 8, 0.01, 100.0);
  const auto h = solve_head(assemble_system(K, {0.7, 0.7}));
  for (double v : h.values()) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("solve residual and maximum principle on high-contrast fields") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto K = GridSpec{32, 32}.field();
    Rng rng(seed);
    for (double& v : K.values()) v = rng.uniform() < 0.5 ? 1e-5 * std::exp(rng.normal()) : 1e-8 * std::exp(rng.normal());
    const auto sys = assemble_system(K, {});
    const auto h = solve_head(sys);
    CHECK(h.all_finite());
    CHECK(relative_residual(sys, h.values(), sys.rhs) < 1e-10);
    CHECK(h.min() >= -1e-12);
    CHECK(h.max() <= 1.0 + 1e-12);
  }
}

TEST_CASE("iterative path agrees with the direct factorization") {
  const auto K = test::random_conductivity(30, 20, 5, 0.1, 10.0);
  const auto sys = assemble_system(K, {});
  SolverOptions it;
  it.method = SolverMethod::Iterative;
  const Factorization fi(sys, it), fd(sys);
  CHECK_FALSE(fi.is_direct());
  CHECK(fd.is_direct());
  CHECK(max_abs_diff(solve_head(fi), solve_head(fd)) < 1e-9);
  SolverOptions starved = it;
  starved.max_cg_iterations = 2;
  starved.refinement_steps = 0;
  CHECK_THROWS_AS(solve_head(sys, starved), SolverError);
}

TEST_CASE("mirror symmetry") {
  const std::size_t nx = 14, ny = 9;
  const auto K = test::random_conductivity(nx, ny, 12, 0.1, 10.0);
  auto R = K;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) R(i, j) = K(nx - 1 - i, j);
  const auto h = solve_head(assemble_system(K, {1.0, 0.0}));
  const auto hr = solve_head(assemble_system(R, {0.0, 1.0}));
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) CHECK(std::abs(hr(i, j) - h(nx - 1 - i, j)) < 1e-12);
}

TEST_CASE("grid refinement converges at first order or better") {
  // K = exp(a x) is smooth; the exact head is 1 - E(x)/E(50) with E(x) = int_{-50}^{x} exp(-a s) ds.
  const double a = 0.03;
  auto E = [a](double x) { return (std::exp(50 * a) - std::exp(-a * x)) / a; };
  std::vector<double> errors;
  for (std::size_t n : {25, 50, 100}) {
    const GridSpec g{n, 3};
    auto K = g.field();
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) K(i, j) = std::exp(a * g.x_center(i));
    const auto h = solve_head(assemble_system(K, {}));
    double err = 0.0;
    for (std::size_t i = 0; i < g.nx; ++i) err = std::max(err, std::abs(h(i, 1) - (1.0 - E(g.x_center(i)) / E(50.0))));
    errors.push_back(err);
  }
  for (std::size_t k = 1; k < errors.size(); ++k) {
    const double order = std::log2(errors[k - 1] / errors[k]);
    CAPTURE(order);
    CHECK(order >= 0.9);
  }
}

TEST_CASE("Darcy velocities") {
  const GridSpec g;
  SUBCASE("homogeneous medium has uniform flow") {
    const auto K = g.field(1.0);
    const auto u = darcy_velocity(K, solve_head(assemble_system(K, {})), {});
    for (double v : u.ux) CHECK(v == doctest::Approx(0.01).epsilon(1e-9));
    for (double v : u.uy) CHECK(std::abs(v) < 1e-13);
  }
  SUBCASE("constant head has no flow") {
    const auto K = test::random_conductivity(10, 10, 1);
    const auto u = darcy_velocity(K, K.with_values(std::vector<double>(100, 0.3)), {0.3, 0.3});
    for (double v : u.ux) CHECK(v == 0.0);
    for (double v : u.uy) CHECK(v == 0.0);
  }
  SUBCASE("discrete flux balance in every cell") {
    auto K = GridSpec{40, 30}.field();
    Rng rng(7);
    for (double& v : K.values()) v = std::exp(2 * rng.normal());
    const auto h = solve_head(assemble_system(K, {}));
    const auto div = divergence(darcy_velocity(K, h, {}));
    for (double v : div.values()) CHECK(std::abs(v) < 1e-10);
  }
  CHECK_THROWS(darcy_velocity(g.field(1.0), GridSpec{10, 10}.field(), {}));
}

TEST_CASE("LDF2 round trip") {
  auto f = test::random_conductivity(6, 5, 9);
  f[3] = -0.0;
  f[4] = std::nextafter(0.0, 1.0);
  std::stringstream ss;
  write_field(ss, f);
  const auto bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "LDF2");
  CHECK(bytes.size() == 4 + 4 + 4 + 4 + 8 + 8 + 30 * 8);
  const auto g = read_field(ss);
  CHECK(g.nx() == 6);
  CHECK(g.dx() == f.dx());
  CHECK(std::memcmp(f.storage().data(), g.storage().data(), f.size() * sizeof(double)) == 0);
  std::stringstream bad("LDF3" + bytes.substr(4));
  CHECK_THROWS(read_field(bad));
  std::stringstream cut(bytes.substr(0, 40));
  CHECK_THROWS(read_field(cut));
  CHECK_THROWS(load_field("/nonexistent/field.ldf2"));
}
