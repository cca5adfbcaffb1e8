#include "latentflow/adjoint/adjoint.hpp"

#include <stdexcept>

namespace lf::adjoint {

using fvm::BoundaryConditions;
using fvm::ScalarField2D;

AdjointState solve_adjoint(const fvm::Factorization& factorization, const ScalarField2D& r) {
  const auto& sys = factorization.system();
  if (r.nx() != sys.nx || r.ny() != sys.ny) throw std::invalid_argument("solve_adjoint: grid mismatch");
  return {ScalarField2D(sys.nx, sys.ny, sys.dx, sys.dy, factorization.solve_transpose(r.values()))};
}

AdjointState solve_adjoint(const fvm::SparseLinearSystem& system, const ScalarField2D& r) {
  return solve_adjoint(fvm::Factorization(system), r);
}

namespace {

void check_grids(const AdjointState& s, const ScalarField2D& h, const ScalarField2D& K) {
  fvm::require_same_grid(s.lambda, h, "conductivity_gradient");
  fvm::require_same_grid(h, K, "conductivity_gradient");
}

// d/dk_self of the harmonic mean 2 k_self k_other / (k_self + k_other).
inline double dharm(double k_self, double k_other) {
  const double s = k_self + k_other;
  return 2.0 * k_other * k_other / (s * s);
}

}  // namespace

ScalarField2D conductivity_gradient(const AdjointState& state, const ScalarField2D& h, const ScalarField2D& K,
                                    const BoundaryConditions& bc) {
  check_grids(state, h, K);
  const auto& lam = state.lambda;
  const std::size_t nx = K.nx(), ny = K.ny();
  const double gx = fvm::x_factor(K.dx(), K.dy()), gy = fvm::y_factor(K.dx(), K.dy());
  ScalarField2D grad = K.with_values(std::vector<double>(K.size(), 0.0));

  const auto cells = static_cast<std::ptrdiff_t>(K.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pp = 0; pp < cells; ++pp) {
    const auto p = static_cast<std::size_t>(pp);
    const std::size_t i = p % nx, j = p / nx;
    const double kp = K[p], lp = lam[p], hp = h[p];
    double g = 0.0;
    auto face = [&](std::size_t q, double geom) {
      g -= geom * dharm(kp, K[q]) * (lp - lam[q]) * (h[q] - hp);
    };
    if (j > 0) face(p - nx, gy);
    if (i > 0) face(p - 1, gx);
    else g -= 2.0 * gx * lp * (bc.left_head - hp);
    if (i + 1 < nx) face(p + 1, gx);
    else g -= 2.0 * gx * lp * (bc.right_head - hp);
    if (j + 1 < ny) face(p + nx, gy);
    grad[p] = g;
  }
  return grad;
}

namespace serial {

ScalarField2D conductivity_gradient(const AdjointState& state, const ScalarField2D& h, const ScalarField2D& K,
                                    const BoundaryConditions& bc) {
  check_grids(state, h, K);
  const auto& lam = state.lambda;
  const std::size_t nx = K.nx(), ny = K.ny();
  const double gx = fvm::x_factor(K.dx(), K.dy()), gy = fvm::y_factor(K.dx(), K.dy());
  ScalarField2D grad = K.with_values(std::vector<double>(K.size(), 0.0));

  // Interior face (p, q): lambda^T dA h = dT (lambda_p - lambda_q)(h_q - h_p).
  auto scatter = [&](std::size_t p, std::size_t q, double geom) {
    const double w = (lam[p] - lam[q]) * (h[q] - h[p]);
    grad[p] -= geom * dharm(K[p], K[q]) * w;
    grad[q] -= geom * dharm(K[q], K[p]) * w;
  };
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) scatter(j * nx + i, j * nx + i + 1, gx);
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) scatter(j * nx + i, (j + 1) * nx + i, gy);
  // Ghost faces: T_g = 2 K_p gx enters both A_pp and b_p.
  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t l = j * nx, r = j * nx + nx - 1;
    grad[l] -= 2.0 * gx * lam[l] * (bc.left_head - h[l]);
    grad[r] -= 2.0 * gx * lam[r] * (bc.right_head - h[r]);
  }
  return grad;
}

}  // namespace serial

DifferentiableDarcy::DifferentiableDarcy(BoundaryConditions bc, fvm::SolverOptions options)
    : bc_(bc), options_(options) {}

const ScalarField2D& DifferentiableDarcy::forward(const ScalarField2D& K) {
  state_.reset();
  fvm::Factorization fact(fvm::assemble_system(K, bc_), options_);
  ScalarField2D h = fvm::solve_head(fact);
  state_.emplace(State{K, std::move(fact), std::move(h)});
  return state_->h;
}

const DifferentiableDarcy::State& DifferentiableDarcy::state() const {
  if (!state_) throw std::logic_error("DifferentiableDarcy: no forward solve has been performed");
  return *state_;
}

const ScalarField2D& DifferentiableDarcy::head() const { return state().h; }
const ScalarField2D& DifferentiableDarcy::conductivity() const { return state().K; }
const fvm::Factorization& DifferentiableDarcy::factorization() const { return state().factorization; }

ScalarField2D DifferentiableDarcy::vjp(const ScalarField2D& K, const ScalarField2D& cotangent) const {
  const State& s = state();
  if (!(K == s.K))
    throw std::logic_error("DifferentiableDarcy::vjp: conductivity differs from the cached forward state");
  const AdjointState adj = solve_adjoint(s.factorization, cotangent);
  return conductivity_gradient(adj, s.h, s.K, bc_);
}

ScalarField2D solver_vjp(const ScalarField2D& K, const ScalarField2D& cotangent, const BoundaryConditions& bc) {
  DifferentiableDarcy darcy(bc);
  darcy.forward(K);
  return darcy.vjp(K, cotangent);
}

}  // namespace lf::adjoint
