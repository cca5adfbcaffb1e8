#pragma once

#include <optional>

#include "latentflow/fvm/assembly.hpp"
#include "latentflow/fvm/field.hpp"
#include "latentflow/fvm/solver.hpp"

namespace lf::adjoint {

struct AdjointState {
  fvm::ScalarField2D lambda;
};

/// Solves A^T lambda = r.
AdjointState solve_adjoint(const fvm::Factorization& factorization, const fvm::ScalarField2D& r);
AdjointState solve_adjoint(const fvm::SparseLinearSystem& system, const fvm::ScalarField2D& r);

/// dl/dK = lambda^T (db/dK - dA/dK h), gathered per cell over its faces (OpenMP over cells).
fvm::ScalarField2D conductivity_gradient(const AdjointState& state, const fvm::ScalarField2D& h,
                                         const fvm::ScalarField2D& K, const fvm::BoundaryConditions& bc);

namespace serial {
/// Face loop that scatters into both adjacent cells; reference for the gathered version.
fvm::ScalarField2D conductivity_gradient(const AdjointState& state, const fvm::ScalarField2D& h,
                                         const fvm::ScalarField2D& K, const fvm::BoundaryConditions& bc);
}  // namespace serial

/// Forward solve cached for vector-Jacobian products. The cache is immutable after forward(),
/// so concurrent vjp() calls on one instance are fine as long as the direct path is in use.
class DifferentiableDarcy {
 public:
  explicit DifferentiableDarcy(fvm::BoundaryConditions bc = {}, fvm::SolverOptions options = {});

  const fvm::ScalarField2D& forward(const fvm::ScalarField2D& K);

  /// Gradient of a downstream loss with respect to K given dl/dh. Throws std::logic_error when
  /// K is not the conductivity of the cached forward solve.
  fvm::ScalarField2D vjp(const fvm::ScalarField2D& K, const fvm::ScalarField2D& cotangent) const;

  bool has_state() const { return state_.has_value(); }
  const fvm::ScalarField2D& head() const;
  const fvm::ScalarField2D& conductivity() const;
  const fvm::Factorization& factorization() const;
  const fvm::BoundaryConditions& boundary() const { return bc_; }

 private:
  struct State {
    fvm::ScalarField2D K;
    fvm::Factorization factorization;
    fvm::ScalarField2D h;
  };
  const State& state() const;

  fvm::BoundaryConditions bc_;
  fvm::SolverOptions options_;
  std::optional<State> state_;
};

/// One-shot VJP: assemble, solve, then pull the cotangent back to K.
fvm::ScalarField2D solver_vjp(const fvm::ScalarField2D& K, const fvm::ScalarField2D& cotangent,
                              const fvm::BoundaryConditions& bc = {});

}  // namespace lf::adjoint
