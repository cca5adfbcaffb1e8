#pragma once

#include <cstdint>
#include <vector>

#include "latentflow/ad/ops.hpp"
#include "latentflow/ad/params.hpp"

namespace lf::prior {

/// Encoder: per level a 4x4 stride-2 conv + SiLU, then 1x1 heads for mu and log-variance.
/// Decoder: 3x3 conv + SiLU, per level a 4x4 stride-2 transpose conv + SiLU, final linear 3x3 conv.
struct VaeConfig {
  std::size_t resolution = 32;
  std::vector<std::size_t> channels{16, 32, 64};
  std::size_t latent_channels = 4;

  std::size_t latent_size() const;  // spatial extent of the latent grid
  ad::Shape latent_shape(std::size_t batch = 1) const;
  void validate() const;
};

ad::ParameterSet init_vae(const VaeConfig& config, std::uint64_t seed);

struct Posterior {
  ad::Var mu;
  ad::Var logvar;
  ad::Var sigma;  // exp(0.5 logvar)
};

/// x: [N, 1, R, R] in normalized units.
Posterior encode(const ad::BoundParams& p, const VaeConfig& config, ad::Var x);
/// z0: [N, c, h, h] -> [N, 1, R, R].
ad::Var decode(const ad::BoundParams& p, const VaeConfig& config, ad::Var z0);
/// z0 = mu + sigma * eps with eps held constant.
ad::Var reparameterize(ad::Var mu, ad::Var sigma, const ad::Tensor& eps);

/// Sum over elements of 0.5 (mu^2 + sigma^2 - 1 - ln sigma^2), written with logvar.
ad::Var gaussian_kl(ad::Var mu, ad::Var logvar);

/// Per-sample ||x - x_hat||_1 + lambda_kl KL, averaged over the batch.
ad::Var vae_loss(ad::Var x, ad::Var x_hat, ad::Var mu, ad::Var logvar, double lambda_kl);

/// Names of the parameters in each head, for tests that zero the final layers.
inline constexpr const char* kMuHeadWeight = "enc.mu.w";
inline constexpr const char* kMuHeadBias = "enc.mu.b";
inline constexpr const char* kLogvarHeadWeight = "enc.logvar.w";
inline constexpr const char* kLogvarHeadBias = "enc.logvar.b";

}  // namespace lf::prior
