#pragma once

#include <cstddef>
#include <vector>

#include "latentflow/fvm/field.hpp"

namespace lf::inversion {

struct Observation {
  std::size_t i = 0, j = 0;
  double value = 0.0;
};

/// Point observations at cell centres: heads h*, plus optional conductivity values K*.
struct ObservationSet {
  std::vector<Observation> heads;
  std::vector<Observation> conductivity;

  /// Throws on out-of-range cells, duplicate locations or non-finite values.
  void validate(std::size_t nx, std::size_t ny) const;
  bool empty() const { return heads.empty() && conductivity.empty(); }
};

/// m evenly spaced interior indices on an n-cell axis: floor((2k + 1) n / (2m)).
std::vector<std::size_t> layout_indices(std::size_t n, std::size_t m);

/// Heads sampled from `h` on an m x m layout.
ObservationSet observe_heads(const fvm::ScalarField2D& h, std::size_t m);
/// Adds conductivity samples of `K` on an m x m layout.
void add_conductivity_observations(ObservationSet& obs, const fvm::ScalarField2D& K, std::size_t m);

/// sum over observed cells of (h* - h)^2.
double data_misfit(const fvm::ScalarField2D& h, const ObservationSet& obs);
/// d(data_misfit)/dh: 2 (h - h*) at observed cells, zero elsewhere.
fvm::ScalarField2D misfit_gradient(const fvm::ScalarField2D& h, const ObservationSet& obs);

}  // namespace lf::inversion
