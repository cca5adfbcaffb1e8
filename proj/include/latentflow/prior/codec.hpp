#pragma once

#include "latentflow/ad/tape.hpp"
#include "latentflow/ad/tensor.hpp"
#include "latentflow/fvm/field.hpp"
#include "latentflow/synth/dataset.hpp"

namespace lf::prior {

/// Maps conductivity to network units u in [-1, 1] via ln(K + floor) and the training-split range.
/// The solver consumes K_fvm = exp(denormalized u) = K + floor, which is positive for any u.
class FieldCodec {
 public:
  FieldCodec() = default;
  explicit FieldCodec(const synth::LogStats& stats);

  const synth::LogStats& stats() const { return stats_; }
  double half_range() const { return 0.5 * (stats_.log_max - stats_.log_min); }
  double center() const { return 0.5 * (stats_.log_max + stats_.log_min); }

  double to_unit(double K) const;
  double unit_to_log(double u) const { return center() + half_range() * u; }

  /// Field -> [1, 1, ny, nx] tensor of u values.
  ad::Tensor encode_field(const fvm::ScalarField2D& K) const;
  /// u tensor -> K_fvm field on `grid`.
  fvm::ScalarField2D solver_conductivity(const ad::Tensor& u, const fvm::GridSpec& grid) const;
  /// Differentiable u -> K_fvm.
  ad::Var solver_conductivity(ad::Var u) const;
  /// K_fvm -> reported K (floor removed).
  fvm::ScalarField2D reported_conductivity(const fvm::ScalarField2D& K_fvm) const;

 private:
  synth::LogStats stats_{0.0, -1.0, 1.0};
};

}  // namespace lf::prior
