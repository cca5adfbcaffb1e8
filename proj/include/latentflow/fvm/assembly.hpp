#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "latentflow/fvm/field.hpp"

namespace lf::fvm {

/// Fixed heads on the left (x = x_min) and right (x = x_max) faces; top and bottom are no-flux.
struct BoundaryConditions {
  double left_head = 1.0;
  double right_head = 0.0;
};

/// CSR matrix A(K) with right-hand side b, assembled with a negative diagonal.
struct SparseLinearSystem {
  std::size_t nx = 0, ny = 0;
  double dx = 1.0, dy = 1.0;
  BoundaryConditions bc;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col_idx;
  std::vector<double> vals;
  std::vector<double> rhs;

  std::size_t n() const { return nx * ny; }
  std::size_t nnz() const { return vals.size(); }
  /// Entry (r, c), zero when outside the pattern.
  double at(std::size_t r, std::size_t c) const;
};

double harmonic_face_conductivity(double k_left, double k_right);

/// Face transmissibility geometry: T = K_face * x_factor on x-faces, K_face * y_factor on y-faces.
inline double x_factor(double dx, double dy) { return dy / dx; }
inline double y_factor(double dx, double dy) { return dx / dy; }

/// Row-parallel assembly (OpenMP); each row is written by exactly one thread.
SparseLinearSystem assemble_system(const ScalarField2D& K, const BoundaryConditions& bc);

namespace serial {
/// Face-by-face scatter assembly kept as an independent reference.
SparseLinearSystem assemble_system(const ScalarField2D& K, const BoundaryConditions& bc);
}  // namespace serial

std::vector<double> multiply(const SparseLinearSystem& sys, std::span<const double> x);
std::vector<double> multiply_transpose(const SparseLinearSystem& sys, std::span<const double> x);

/// ||A x - b||_2 / max(||b||_2, tiny).
double relative_residual(const SparseLinearSystem& sys, std::span<const double> x, std::span<const double> b);

}  // namespace lf::fvm
