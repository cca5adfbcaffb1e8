#pragma once

#include <filesystem>
#include <vector>

#include "latentflow/inversion/objective.hpp"
#include "latentflow/metrics/errors.hpp"

namespace lf::inversion {

struct LossRecord {
  std::size_t iter = 0;
  double misfit = 0.0;
  double regularizer = 0.0;  // weighted regularizer plus any conductivity misfit
  double total = 0.0;
  double grad_norm = 0.0;
};

struct InversionResult {
  fvm::ScalarField2D K;      // reported conductivity of the best iterate
  fvm::ScalarField2D K_fvm;  // solver conductivity of the best iterate
  fvm::ScalarField2D h;
  ad::Tensor x;              // best latent (or pixel) vector
  std::vector<LossRecord> history;
  std::size_t best_iter = 0;
  std::size_t iterations = 0;
  bool aborted = false;      // non-finite loss or solver failure
  std::string abort_reason;
  bool early_stopped = false;
  std::optional<metrics::MetricsBundle> metrics;
};

/// Descent on the objective from its initial point (Adam by default, plain descent when
/// config.adam is false). Returns the best-loss iterate.
InversionResult optimize(Objective& objective, const InversionConfig& config);

/// Latent-diffusion inversion (z_T through the DDIM chain), or z_0 through the decoder only
/// when config.mode is VaeOnly.
InversionResult invert(const ObservationSet& obs, const InversionConfig& config, const prior::LatentPrior& prior);
InversionResult vae_prior_invert(const ObservationSet& obs, InversionConfig config, const prior::LatentPrior& prior);
InversionResult pixel_space_invert(const ObservationSet& obs, const InversionConfig& config,
                                   const prior::FieldCodec& codec);

/// Dispatch on config.mode.
InversionResult run_inversion(const ObservationSet& obs, const InversionConfig& config, const prior::LatentPrior& prior);

/// Attaches metrics against a known truth (ln K when `log_domain`).
void attach_metrics(InversionResult& result, const fvm::ScalarField2D& K_true, const fvm::ScalarField2D& h_true,
                    bool log_domain);

/// k_hat.ldf2, h_hat.ldf2, loss.csv and metrics.csv under `dir`.
void write_result_bundle(const std::filesystem::path& dir, const InversionResult& result);

}  // namespace lf::inversion
