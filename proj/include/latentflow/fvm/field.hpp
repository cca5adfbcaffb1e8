#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lf::fvm {

/// Cell-centred values on a uniform Cartesian grid, index p = j * nx + i.
class ScalarField2D {
 public:
  ScalarField2D() = default;
  ScalarField2D(std::size_t nx, std::size_t ny, double dx, double dy, double fill = 0.0);
  ScalarField2D(std::size_t nx, std::size_t ny, double dx, double dy, std::vector<double> values);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[j * nx_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[j * nx_ + i]; }
  double& operator[](std::size_t p) { return values_[p]; }
  double operator[](std::size_t p) const { return values_[p]; }

  std::span<double> values() & { return values_; }
  std::span<const double> values() const& { return values_; }
  // Temporaries hand over their storage so range-for over them stays valid.
  std::vector<double> values() && { return std::move(values_); }
  std::vector<double>& storage() { return values_; }
  const std::vector<double>& storage() const { return values_; }

  bool same_grid(const ScalarField2D& other) const;
  bool all_finite() const;
  bool all_positive() const;
  double min() const;
  double max() const;
  double mean() const;

  /// A field on this grid with the given values.
  ScalarField2D with_values(std::vector<double> values) const;

  friend bool operator==(const ScalarField2D& a, const ScalarField2D& b) = default;

 private:
  std::size_t nx_ = 0, ny_ = 0;
  double dx_ = 1.0, dy_ = 1.0;
  std::vector<double> values_;
};

/// Physical layout of the domain: cell centres start at x_min + dx/2.
struct GridSpec {
  std::size_t nx = 100, ny = 100;
  double x_min = -50.0, x_max = 50.0;
  double y_min = -50.0, y_max = 50.0;

  double dx() const { return (x_max - x_min) / static_cast<double>(nx); }
  double dy() const { return (y_max - y_min) / static_cast<double>(ny); }
  double x_center(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * dx(); }
  double y_center(std::size_t j) const { return y_min + (static_cast<double>(j) + 0.5) * dy(); }
  ScalarField2D field(double fill = 0.0) const { return ScalarField2D(nx, ny, dx(), dy(), fill); }
};

void require_same_grid(const ScalarField2D& a, const ScalarField2D& b, const char* op);

}  // namespace lf::fvm
