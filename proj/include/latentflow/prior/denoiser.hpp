#pragma once

#include <cstdint>
#include <vector>

#include "latentflow/ad/ops.hpp"
#include "latentflow/ad/params.hpp"

namespace lf::prior {

/// Small U-Net over the latent grid: two stride-2 down levels, a middle block, two transpose-conv
/// up levels with concatenated skips. Every residual block adds a projection of the sinusoidal
/// timestep embedding per channel.
struct DenoiserConfig {
  std::size_t latent_channels = 4;
  std::size_t latent_size = 4;  // must be divisible by 4
  std::size_t base_channels = 32;
  std::size_t time_dim = 32;

  void validate() const;
};

ad::ParameterSet init_denoiser(const DenoiserConfig& config, std::uint64_t seed);

/// [N, time_dim] sinusoidal features of integer timesteps.
ad::Tensor timestep_embedding(const std::vector<std::size_t>& t, std::size_t dim);

/// eps_theta(z_t, t) for z_t of shape [N, c, h, h] and one timestep per sample.
ad::Var predict_noise(const ad::BoundParams& p, const DenoiserConfig& config, ad::Var z_t,
                      const std::vector<std::size_t>& t);

}  // namespace lf::prior
