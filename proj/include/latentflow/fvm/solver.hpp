#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "latentflow/fvm/assembly.hpp"
#include "latentflow/fvm/field.hpp"

namespace lf::fvm {

enum class SolverMethod { Auto, Direct, Iterative };

struct SolverOptions {
  SolverMethod method = SolverMethod::Auto;
  std::size_t direct_limit = 40000;  // Auto uses the direct factorization up to this many unknowns
  double residual_tolerance = 1e-10;
  double cg_tolerance = 1e-13;
  std::size_t max_cg_iterations = 0;  // 0 means 10 * n
  int refinement_steps = 3;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Factorization of -A (SPD). Reused by forward and adjoint solves; not safe to share across threads
/// while the iterative path is active, since it keeps scratch buffers.
class Factorization {
 public:
  explicit Factorization(SparseLinearSystem system, const SolverOptions& options = {});
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;
  Factorization(const Factorization&) = delete;
  Factorization& operator=(const Factorization&) = delete;

  /// x with A x = b, checked against the residual tolerance.
  std::vector<double> solve(std::span<const double> b) const;
  /// x with A^T x = b. A is symmetric, so this shares the factorization; the residual is
  /// checked against A^T explicitly.
  std::vector<double> solve_transpose(std::span<const double> b) const;

  const SparseLinearSystem& system() const { return system_; }
  const SolverOptions& options() const { return options_; }
  bool is_direct() const;

 private:
  struct Impl;
  std::vector<double> raw_solve(std::span<const double> b) const;

  SparseLinearSystem system_;
  SolverOptions options_;
  std::unique_ptr<Impl> impl_;
};

/// Head field for A(K) h = b.
ScalarField2D solve_head(const Factorization& factorization);
ScalarField2D solve_head(const SparseLinearSystem& system, const SolverOptions& options = {});

}  // namespace lf::fvm
