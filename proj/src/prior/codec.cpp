#include "latentflow/prior/codec.hpp"

#include <cmath>
#include <stdexcept>

#include "latentflow/ad/ops.hpp"

namespace lf::prior {

FieldCodec::FieldCodec(const synth::LogStats& stats) : stats_(stats) {
  if (!(stats.log_max > stats.log_min)) throw std::invalid_argument("FieldCodec: log_max must exceed log_min");
  if (stats.floor < 0.0) throw std::invalid_argument("FieldCodec: floor must be non-negative");
}

double FieldCodec::to_unit(double K) const {
  const double v = K + stats_.floor;
  if (!(v > 0.0)) throw std::invalid_argument("FieldCodec: K + floor must be positive");
  return (std::log(v) - center()) / half_range();
}

ad::Tensor FieldCodec::encode_field(const fvm::ScalarField2D& K) const {
  ad::Tensor t({1, 1, K.ny(), K.nx()});
  for (std::size_t p = 0; p < K.size(); ++p) t[p] = to_unit(K[p]);
  return t;
}

fvm::ScalarField2D FieldCodec::solver_conductivity(const ad::Tensor& u, const fvm::GridSpec& grid) const {
  if (u.size() != grid.nx * grid.ny) throw std::invalid_argument("FieldCodec: tensor does not match grid");
  auto f = grid.field();
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = std::exp(unit_to_log(u[p]));
  return f;
}

ad::Var FieldCodec::solver_conductivity(ad::Var u) const {
  return ad::exp(ad::add_scalar(ad::scale(u, half_range()), center()));
}

fvm::ScalarField2D FieldCodec::reported_conductivity(const fvm::ScalarField2D& K_fvm) const {
  auto f = K_fvm;
  for (double& v : f.values()) v -= stats_.floor;
  return f;
}

}  // namespace lf::prior
