#include "latentflow/inversion/observations.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace lf::inversion {

namespace {
void check_list(const std::vector<Observation>& list, std::size_t nx, std::size_t ny, const char* what) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& o : list) {
    if (o.i >= nx || o.j >= ny)
      throw std::out_of_range(std::string(what) + " observation at (" + std::to_string(o.i) + ", " +
                              std::to_string(o.j) + ") outside the " + std::to_string(nx) + "x" + std::to_string(ny) +
                              " grid");
    if (!std::isfinite(o.value)) throw std::invalid_argument(std::string(what) + " observation is not finite");
    if (!seen.emplace(o.i, o.j).second)
      throw std::invalid_argument(std::string(what) + " observation duplicated at (" + std::to_string(o.i) + ", " +
                                  std::to_string(o.j) + ")");
  }
}
}  // namespace

void ObservationSet::validate(std::size_t nx, std::size_t ny) const {
  check_list(heads, nx, ny, "head");
  check_list(conductivity, nx, ny, "conductivity");
}

std::vector<std::size_t> layout_indices(std::size_t n, std::size_t m) {
  if (m == 0 || m > n) throw std::invalid_argument("layout_indices: need 1 <= m <= n");
  std::vector<std::size_t> idx(m);
  for (std::size_t k = 0; k < m; ++k) idx[k] = ((2 * k + 1) * n) / (2 * m);
  return idx;
}

ObservationSet observe_heads(const fvm::ScalarField2D& h, std::size_t m) {
  ObservationSet obs;
  const auto xi = layout_indices(h.nx(), m), yj = layout_indices(h.ny(), m);
  for (std::size_t j : yj)
    for (std::size_t i : xi) obs.heads.push_back({i, j, h(i, j)});
  return obs;
}

void add_conductivity_observations(ObservationSet& obs, const fvm::ScalarField2D& K, std::size_t m) {
  const auto xi = layout_indices(K.nx(), m), yj = layout_indices(K.ny(), m);
  for (std::size_t j : yj)
    for (std::size_t i : xi) obs.conductivity.push_back({i, j, K(i, j)});
}

double data_misfit(const fvm::ScalarField2D& h, const ObservationSet& obs) {
  obs.validate(h.nx(), h.ny());
  double s = 0.0;
  for (const auto& o : obs.heads) {
    const double d = o.value - h(o.i, o.j);
    s += d * d;
  }
  return s;
}

fvm::ScalarField2D misfit_gradient(const fvm::ScalarField2D& h, const ObservationSet& obs) {
  obs.validate(h.nx(), h.ny());
  auto g = h.with_values(std::vector<double>(h.size(), 0.0));
  for (const auto& o : obs.heads) g(o.i, o.j) = 2.0 * (h(o.i, o.j) - o.value);
  return g;
}

}  // namespace lf::inversion
