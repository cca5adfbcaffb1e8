#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "latentflow/ad/optim.hpp"
#include "latentflow/ad/params.hpp"
#include "latentflow/common/rng.hpp"
#include "latentflow/prior/denoiser.hpp"
#include "latentflow/prior/sampler.hpp"
#include "latentflow/prior/schedule.hpp"
#include "latentflow/prior/vae.hpp"

namespace lf::prior {

struct TrainConfig {
  double lr = 1e-3;
  std::size_t epochs = 50;
  std::size_t batch = 32;
  double lambda_kl = 1e-4;
  std::uint64_t seed = 0;
  /// When set, `<name>.ldad`, `<name>.state.ldad` and `<name>_log.csv` are rewritten every epoch.
  std::filesystem::path checkpoint_dir;
  std::string name = "model";
  /// Continue from `<name>.ldad` / `<name>.state.ldad` in checkpoint_dir.
  bool resume = false;
  /// Stop after this many epochs of this call (0 = run to `epochs`); used to test resumption.
  std::size_t max_epochs_this_run = 0;
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ad::ParameterSet params;
  std::vector<EpochLog> log;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stacks [1, ...] tensors selected by `idx` into one [B, ...] batch.
ad::Tensor stack(const std::vector<ad::Tensor>& items, const std::vector<std::size_t>& idx);

/// Inputs are [1, 1, R, R] normalized fields.
TrainResult train_vae(const std::vector<ad::Tensor>& train, const std::vector<ad::Tensor>& val, const VaeConfig& config,
                      const TrainConfig& tc);

/// Posterior means of the frozen VAE, each [1, c, h, h]. Parameters are bound without gradients.
std::vector<ad::Tensor> encode_means(const ad::ParameterSet& vae, const VaeConfig& config,
                                     const std::vector<ad::Tensor>& data);

/// 1 / standard deviation of all latent entries.
double latent_scale_factor(const std::vector<ad::Tensor>& latents);

/// Mean over the batch of ||eps - eps_theta(sqrt(abar_t) z0 + sqrt(1 - abar_t) eps, t)||^2,
/// with t uniform on 1..T and eps standard normal drawn from `rng`.
ad::Var diffusion_loss(ad::Tape& tape, const NoisePredictor& predictor, const ad::Tensor& z0_batch,
                       const NoiseSchedule& schedule, Rng& rng);

/// Latents in diffusion space (already scaled).
TrainResult train_diffusion(const std::vector<ad::Tensor>& train, const std::vector<ad::Tensor>& val,
                            const DenoiserConfig& config, const NoiseSchedule& schedule, const TrainConfig& tc);

void write_log_csv(const std::filesystem::path& path, const std::vector<EpochLog>& log);

}  // namespace lf::prior
