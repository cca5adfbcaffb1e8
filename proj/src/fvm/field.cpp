#include "latentflow/fvm/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lf::fvm {

ScalarField2D::ScalarField2D(std::size_t nx, std::size_t ny, double dx, double dy, double fill)
    : ScalarField2D(nx, ny, dx, dy, std::vector<double>(nx * ny, fill)) {}

ScalarField2D::ScalarField2D(std::size_t nx, std::size_t ny, double dx, double dy, std::vector<double> values)
    : nx_(nx), ny_(ny), dx_(dx), dy_(dy), values_(std::move(values)) {
  if (nx == 0 || ny == 0) throw std::invalid_argument("field: cell counts must be positive");
  if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("field: spacing must be positive");
  if (values_.size() != nx * ny)
    throw std::invalid_argument("field: expected " + std::to_string(nx * ny) + " values, got " +
                                std::to_string(values_.size()));
}

bool ScalarField2D::same_grid(const ScalarField2D& other) const {
  return nx_ == other.nx_ && ny_ == other.ny_ && dx_ == other.dx_ && dy_ == other.dy_;
}

bool ScalarField2D::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool ScalarField2D::all_positive() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0 && std::isfinite(v); });
}

double ScalarField2D::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField2D::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField2D::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

ScalarField2D ScalarField2D::with_values(std::vector<double> values) const {
  return ScalarField2D(nx_, ny_, dx_, dy_, std::move(values));
}

void require_same_grid(const ScalarField2D& a, const ScalarField2D& b, const char* op) {
  if (!a.same_grid(b))
    throw std::invalid_argument(std::string(op) + ": grid mismatch " + std::to_string(a.nx()) + "x" +
                                std::to_string(a.ny()) + " vs " + std::to_string(b.nx()) + "x" +
                                std::to_string(b.ny()));
}

}  // namespace lf::fvm
