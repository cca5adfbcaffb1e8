#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "latentflow/ad/tape.hpp"
#include "latentflow/adjoint/adjoint.hpp"
#include "latentflow/fvm/assembly.hpp"
#include "latentflow/inversion/observations.hpp"
#include "latentflow/prior/latent_prior.hpp"

namespace lf::inversion {

enum class PriorMode { LatentDiffusion, VaeOnly, PixelSpace };
std::string to_string(PriorMode mode);
PriorMode parse_prior_mode(const std::string& text);

struct InversionConfig {
  double beta = 1e-3;
  double eta = 1e-1;
  std::size_t max_iter = 500;
  std::size_t ddim_steps = 20;
  PriorMode mode = PriorMode::LatentDiffusion;
  std::uint64_t seed = 0;
  bool adam = true;              // false: plain gradient descent
  double k_obs_weight = 0.0;     // weight of the ln K misfit at conductivity observations
  double smoothing = 0.0;        // Tikhonov weight on neighbour differences (pixel-space only)
  std::size_t patience = 50;     // early-stop window
  double rel_tol = 1e-8;         // early-stop threshold on the relative loss change over the window
  fvm::GridSpec grid{32, 32};
  fvm::BoundaryConditions bc{};

  void validate() const;
};

/// 0.5 ||z||^2.
double latent_regularizer(const ad::Tensor& z);

struct Evaluation {
  double misfit = 0.0;       // head misfit
  double k_misfit = 0.0;     // weighted conductivity misfit
  double regularizer = 0.0;  // already multiplied by its weight
  double total = 0.0;
  fvm::ScalarField2D K_fvm;  // conductivity seen by the solver
  fvm::ScalarField2D h;
};

/// J(x) with a cached forward state; gradient(x) must follow evaluate(x) for the same x.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual Evaluation evaluate(const ad::Tensor& x) = 0;
  /// Throws std::logic_error when the cached forward state belongs to another x.
  virtual ad::Tensor gradient(const ad::Tensor& x) = 0;
  virtual ad::Tensor initial_point() const = 0;
  /// Conductivity reported to users (floor removed) for a solver conductivity.
  virtual fvm::ScalarField2D reported(const fvm::ScalarField2D& K_fvm) const = 0;
};

/// Latent objective: z -> [DDIM chain] -> decoder -> K -> FVM -> misfit, plus beta/2 ||z||^2.
/// Gradient: the adjoint VJP gives dl/dK, which is pulled back by the tape through decoder and chain.
class LatentObjective final : public Objective {
 public:
  LatentObjective(const prior::LatentPrior& prior, ObservationSet obs, InversionConfig config);
  ~LatentObjective() override;

  Evaluation evaluate(const ad::Tensor& z) override;
  ad::Tensor gradient(const ad::Tensor& z) override;
  ad::Tensor initial_point() const override;
  fvm::ScalarField2D reported(const fvm::ScalarField2D& K_fvm) const override;

  /// Decoded normalized field of the last evaluation.
  const ad::Tensor& last_unit() const;

 private:
  struct Cache;
  const prior::LatentPrior& prior_;
  ObservationSet obs_;
  InversionConfig config_;
  std::unique_ptr<Cache> cache_;
};

/// Pixel-space baseline: one normalized log-conductivity value u per cell, K = exp(center + half_range u),
/// with optional Tikhonov smoothing smoothing * sum over faces (u_p - u_q)^2.
class PixelObjective final : public Objective {
 public:
  PixelObjective(const prior::FieldCodec& codec, ObservationSet obs, InversionConfig config);

  Evaluation evaluate(const ad::Tensor& u) override;
  ad::Tensor gradient(const ad::Tensor& u) override;
  ad::Tensor initial_point() const override;
  fvm::ScalarField2D reported(const fvm::ScalarField2D& K_fvm) const override;

 private:
  prior::FieldCodec codec_;
  ObservationSet obs_;
  InversionConfig config_;
  adjoint::DifferentiableDarcy darcy_;
  std::optional<ad::Tensor> cached_u_;
  fvm::ScalarField2D cached_K_;
};

/// dJ/dK_fvm from the head misfit (through the adjoint) and the conductivity misfit.
fvm::ScalarField2D conductivity_cotangent(const adjoint::DifferentiableDarcy& darcy, const fvm::ScalarField2D& K_fvm,
                                          const ObservationSet& obs, double k_obs_weight, double floor);

/// Weighted ln K misfit at conductivity observations.
double conductivity_misfit(const fvm::ScalarField2D& K_fvm, const ObservationSet& obs, double k_obs_weight, double floor);

}  // namespace lf::inversion
