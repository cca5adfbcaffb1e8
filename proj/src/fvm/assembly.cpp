#include "latentflow/fvm/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace lf::fvm {

double SparseLinearSystem::at(std::size_t r, std::size_t c) const {
  const auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  const auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return vals[static_cast<std::size_t>(it - col_idx.begin())];
}

double harmonic_face_conductivity(double k_left, double k_right) {
  if (!(k_left > 0.0) || !(k_right > 0.0))
    throw std::invalid_argument("harmonic_face_conductivity: conductivities must be positive, got " +
                                std::to_string(k_left) + ", " + std::to_string(k_right));
  return 2.0 * k_left * k_right / (k_left + k_right);
}

namespace {

void validate(const ScalarField2D& K) {
  if (K.nx() < 2 || K.ny() < 2)
    throw std::invalid_argument("assemble_system: grid must be at least 2x2, got " + std::to_string(K.nx()) + "x" +
                                std::to_string(K.ny()));
  for (std::size_t p = 0; p < K.size(); ++p)
    if (!(K[p] > 0.0) || !std::isfinite(K[p]))
      throw std::invalid_argument("assemble_system: non-positive conductivity " + std::to_string(K[p]) +
                                  " at cell " + std::to_string(p));
}

SparseLinearSystem empty_system(const ScalarField2D& K, const BoundaryConditions& bc) {
  SparseLinearSystem sys;
  sys.nx = K.nx();
  sys.ny = K.ny();
  sys.dx = K.dx();
  sys.dy = K.dy();
  sys.bc = bc;
  sys.rhs.assign(sys.n(), 0.0);
  return sys;
}

std::size_t row_length(std::size_t i, std::size_t j, std::size_t nx, std::size_t ny) {
  return 1 + (i > 0) + (i + 1 < nx) + (j > 0) + (j + 1 < ny);
}

}  // namespace

SparseLinearSystem assemble_system(const ScalarField2D& K, const BoundaryConditions& bc) {
  validate(K);
  SparseLinearSystem sys = empty_system(K, bc);
  const std::size_t nx = sys.nx, ny = sys.ny, n = sys.n();
  const double gx = x_factor(sys.dx, sys.dy), gy = y_factor(sys.dx, sys.dy);

  sys.row_ptr.assign(n + 1, 0);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) sys.row_ptr[j * nx + i + 1] = row_length(i, j, nx, ny);
  for (std::size_t p = 0; p < n; ++p) sys.row_ptr[p + 1] += sys.row_ptr[p];
  sys.col_idx.resize(sys.row_ptr[n]);
  sys.vals.resize(sys.row_ptr[n]);

  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pp = 0; pp < rows; ++pp) {
    const auto p = static_cast<std::size_t>(pp);
    const std::size_t i = p % nx, j = p / nx;
    const double kp = K[p];
    std::size_t k = sys.row_ptr[p];
    double diag = 0.0, b = 0.0;
    auto put = [&](std::size_t col, double t) {
      sys.col_idx[k] = col;
      sys.vals[k] = t;
      ++k;
      diag -= t;
    };
    // Columns in ascending order: south, west, self, east, north.
    if (j > 0) put(p - nx, harmonic_face_conductivity(kp, K[p - nx]) * gy);
    if (i > 0) {
      put(p - 1, harmonic_face_conductivity(kp, K[p - 1]) * gx);
    } else {
      const double tg = 2.0 * kp * gx;
      diag -= tg;
      b -= tg * bc.left_head;
    }
    const std::size_t self = k++;
    if (i + 1 < nx) {
      put(p + 1, harmonic_face_conductivity(kp, K[p + 1]) * gx);
    } else {
      const double tg = 2.0 * kp * gx;
      diag -= tg;
      b -= tg * bc.right_head;
    }
    if (j + 1 < ny) put(p + nx, harmonic_face_conductivity(kp, K[p + nx]) * gy);
    sys.col_idx[self] = p;
    sys.vals[self] = diag;
    sys.rhs[p] = b;
  }
  return sys;
}

namespace serial {

SparseLinearSystem assemble_system(const ScalarField2D& K, const BoundaryConditions& bc) {
  validate(K);
  SparseLinearSystem sys = empty_system(K, bc);
  const std::size_t nx = sys.nx, ny = sys.ny, n = sys.n();
  const double gx = x_factor(sys.dx, sys.dy), gy = y_factor(sys.dx, sys.dy);

  std::vector<std::map<std::size_t, double>> rows(n);
  auto couple = [&](std::size_t p, std::size_t q, double t) {
    rows[p][q] += t;
    rows[q][p] += t;
    rows[p][p] -= t;
    rows[q][q] -= t;
  };
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const std::size_t p = j * nx + i;
      couple(p, p + 1, harmonic_face_conductivity(K[p], K[p + 1]) * gx);
    }
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t p = j * nx + i;
      couple(p, p + nx, harmonic_face_conductivity(K[p], K[p + nx]) * gy);
    }
  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t left = j * nx, right = j * nx + nx - 1;
    const double tl = 2.0 * K[left] * gx, tr = 2.0 * K[right] * gx;
    rows[left][left] -= tl;
    sys.rhs[left] -= tl * bc.left_head;
    rows[right][right] -= tr;
    sys.rhs[right] -= tr * bc.right_head;
  }

  sys.row_ptr.assign(n + 1, 0);
  for (std::size_t p = 0; p < n; ++p) {
    for (const auto& [c, v] : rows[p]) {
      sys.col_idx.push_back(c);
      sys.vals.push_back(v);
    }
    sys.row_ptr[p + 1] = sys.col_idx.size();
  }
  return sys;
}

}  // namespace serial

std::vector<double> multiply(const SparseLinearSystem& sys, std::span<const double> x) {
  if (x.size() != sys.n()) throw std::invalid_argument("multiply: vector length mismatch");
  std::vector<double> y(sys.n(), 0.0);
  const auto rows = static_cast<std::ptrdiff_t>(sys.n());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pp = 0; pp < rows; ++pp) {
    const auto p = static_cast<std::size_t>(pp);
    double s = 0.0;
    for (std::size_t k = sys.row_ptr[p]; k < sys.row_ptr[p + 1]; ++k) s += sys.vals[k] * x[sys.col_idx[k]];
    y[p] = s;
  }
  return y;
}

std::vector<double> multiply_transpose(const SparseLinearSystem& sys, std::span<const double> x) {
  if (x.size() != sys.n()) throw std::invalid_argument("multiply_transpose: vector length mismatch");
  std::vector<double> y(sys.n(), 0.0);
  for (std::size_t p = 0; p < sys.n(); ++p)
    for (std::size_t k = sys.row_ptr[p]; k < sys.row_ptr[p + 1]; ++k) y[sys.col_idx[k]] += sys.vals[k] * x[p];
  return y;
}

double relative_residual(const SparseLinearSystem& sys, std::span<const double> x, std::span<const double> b) {
  const auto ax = multiply(sys, x);
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < ax.size(); ++p) {
    num += (ax[p] - b[p]) * (ax[p] - b[p]);
    den += b[p] * b[p];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace lf::fvm
