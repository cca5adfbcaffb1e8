#pragma once

#include <filesystem>

#include "latentflow/ad/params.hpp"
#include "latentflow/fvm/field.hpp"
#include "latentflow/prior/codec.hpp"
#include "latentflow/prior/denoiser.hpp"
#include "latentflow/prior/schedule.hpp"
#include "latentflow/prior/vae.hpp"

namespace lf::prior {

/// Schedule parameters persisted with the denoiser.
struct ScheduleConfig {
  std::size_t T = 1000;
  double beta_start = 1e-4;
  double beta_end = 2e-2;
};

/// Trained VAE plus (optionally) the latent denoiser, with everything needed to map latents to K.
struct LatentPrior {
  FieldCodec codec;
  VaeConfig vae_config;
  ad::ParameterSet vae;
  double latent_scale = 1.0;  // diffusion operates on scale * mu
  bool has_denoiser = false;
  DenoiserConfig denoiser_config;
  ad::ParameterSet denoiser;
  ScheduleConfig schedule_config;
  NoiseSchedule schedule = make_schedule(1000);

  DenoiserConfig matching_denoiser_config(std::size_t base_channels = 32) const;
  ad::Shape latent_shape() const { return vae_config.latent_shape(1); }
};

// Files inside a prior directory.
inline constexpr const char* kVaeFile = "vae.ldad";
inline constexpr const char* kDenoiserFile = "denoiser.ldad";

/// VAE checkpoint with its codec, architecture and latent scale stored as "meta." tensors.
void save_vae(const std::filesystem::path& path, const LatentPrior& prior);
void save_denoiser(const std::filesystem::path& path, const LatentPrior& prior);
/// Loads vae.ldad, plus denoiser.ldad when present (or throws when `require_denoiser`).
LatentPrior load_prior(const std::filesystem::path& dir, bool require_denoiser = true);
void save_prior(const std::filesystem::path& dir, const LatentPrior& prior);

/// Without a tape: decoded u for a diffusion-space latent z_T via an n-step DDIM chain.
ad::Tensor sample_unit(const LatentPrior& prior, const ad::Tensor& z_T, std::size_t n_steps);
/// Decoded u straight from a diffusion-space z_0 (no chain).
ad::Tensor decode_unit(const LatentPrior& prior, const ad::Tensor& z0_scaled);
/// Reported conductivity of a DDIM sample on `grid`.
fvm::ScalarField2D sample_field(const LatentPrior& prior, const ad::Tensor& z_T, std::size_t n_steps,
                                const fvm::GridSpec& grid);

}  // namespace lf::prior
