#include "latentflow/prior/vae.hpp"

#include <stdexcept>
#include <string>

#include "latentflow/common/rng.hpp"

namespace lf::prior {

using ad::Shape;
using ad::Tensor;
using ad::Var;

std::size_t VaeConfig::latent_size() const { return resolution >> channels.size(); }

Shape VaeConfig::latent_shape(std::size_t batch) const {
  return {batch, latent_channels, latent_size(), latent_size()};
}

void VaeConfig::validate() const {
  if (channels.empty()) throw std::invalid_argument("vae: at least one encoder level is required");
  if (latent_channels == 0) throw std::invalid_argument("vae: latent_channels must be positive");
  const std::size_t div = std::size_t{1} << channels.size();
  if (resolution == 0 || resolution % div != 0)
    throw std::invalid_argument("vae: resolution " + std::to_string(resolution) + " is not divisible by " +
                                std::to_string(div));
}

namespace {

void add_conv(ad::ParameterSet& ps, const std::string& name, std::size_t cout, std::size_t cin, std::size_t k, Rng& rng,
              double gain = 1.0) {
  ps.add(name + ".w", ad::he_normal({cout, cin, k, k}, cin * k * k, rng, gain));
  ps.add(name + ".b", Tensor({cout}, 0.0));
}

void add_convt(ad::ParameterSet& ps, const std::string& name, std::size_t cin, std::size_t cout, std::size_t k, Rng& rng) {
  // Each output pixel of a stride-2, 4x4 transpose conv receives cin * (k/2)^2 taps.
  ps.add(name + ".w", ad::he_normal({cin, cout, k, k}, cin * (k / 2) * (k / 2), rng));
  ps.add(name + ".b", Tensor({cout}, 0.0));
}

Var conv(const ad::BoundParams& p, const std::string& name, Var x, std::size_t stride, std::size_t pad) {
  return ad::conv2d(x, p[name + ".w"], p[name + ".b"], stride, pad);
}

}  // namespace

ad::ParameterSet init_vae(const VaeConfig& c, std::uint64_t seed) {
  c.validate();
  Rng rng(seed, "vae.init");
  ad::ParameterSet ps;
  std::size_t cin = 1;
  for (std::size_t l = 0; l < c.channels.size(); ++l) {
    add_conv(ps, "enc.down" + std::to_string(l), c.channels[l], cin, 4, rng);
    cin = c.channels[l];
  }
  add_conv(ps, "enc.mu", c.latent_channels, cin, 1, rng, 0.1);
  add_conv(ps, "enc.logvar", c.latent_channels, cin, 1, rng, 0.1);

  const std::size_t top = c.channels.back();
  add_conv(ps, "dec.in", top, c.latent_channels, 3, rng);
  for (std::size_t l = c.channels.size(); l-- > 0;) {
    const std::size_t cout = l == 0 ? c.channels[0] : c.channels[l - 1];
    add_convt(ps, "dec.up" + std::to_string(l), c.channels[l], cout, 4, rng);
  }
  add_conv(ps, "dec.out", 1, c.channels[0], 3, rng, 0.5);
  return ps;
}

Posterior encode(const ad::BoundParams& p, const VaeConfig& c, Var x) {
  const auto& s = x.shape();
  if (s.size() != 4 || s[1] != 1 || s[2] != c.resolution || s[3] != c.resolution)
    throw std::invalid_argument("encode: expected [N,1," + std::to_string(c.resolution) + "," +
                                std::to_string(c.resolution) + "], got " + ad::shape_str(s));
  Var h = x;
  for (std::size_t l = 0; l < c.channels.size(); ++l) h = ad::silu(conv(p, "enc.down" + std::to_string(l), h, 2, 1));
  Posterior post;
  post.mu = conv(p, "enc.mu", h, 1, 0);
  post.logvar = conv(p, "enc.logvar", h, 1, 0);
  post.sigma = ad::exp(ad::scale(post.logvar, 0.5));
  return post;
}

Var decode(const ad::BoundParams& p, const VaeConfig& c, Var z0) {
  const auto& s = z0.shape();
  if (s.size() != 4 || s[1] != c.latent_channels || s[2] != c.latent_size() || s[3] != c.latent_size())
    throw std::invalid_argument("decode: expected latent " + ad::shape_str(c.latent_shape(s.empty() ? 1 : s[0])) +
                                ", got " + ad::shape_str(s));
  Var h = ad::silu(conv(p, "dec.in", z0, 1, 1));
  for (std::size_t l = c.channels.size(); l-- > 0;) {
    const std::string name = "dec.up" + std::to_string(l);
    h = ad::silu(ad::conv_transpose2d(h, p[name + ".w"], p[name + ".b"], 2, 1));
  }
  return conv(p, "dec.out", h, 1, 1);
}

Var reparameterize(Var mu, Var sigma, const Tensor& eps) {
  if (mu.shape() != sigma.shape() || mu.shape() != eps.shape())
    throw std::invalid_argument("reparameterize: mu " + ad::shape_str(mu.shape()) + ", sigma " +
                                ad::shape_str(sigma.shape()) + ", eps " + ad::shape_str(eps.shape()));
  return ad::add(mu, ad::mul(sigma, mu.tape().constant(eps)));
}

Var gaussian_kl(Var mu, Var logvar) {
  // 0.5 * sum(mu^2 + exp(logvar) - 1 - logvar)
  Var inner = ad::sub(ad::add(ad::square(mu), ad::exp(logvar)), ad::add_scalar(logvar, 1.0));
  return ad::scale(ad::sum(inner), 0.5);
}

Var vae_loss(Var x, Var x_hat, Var mu, Var logvar, double lambda_kl) {
  if (x.shape() != x_hat.shape())
    throw std::invalid_argument("vae_loss: x " + ad::shape_str(x.shape()) + " vs x_hat " + ad::shape_str(x_hat.shape()));
  const double batch = static_cast<double>(x.shape()[0]);
  Var rec = ad::sum(ad::abs(ad::sub(x, x_hat)));
  Var total = lambda_kl != 0.0 ? ad::add(rec, ad::scale(gaussian_kl(mu, logvar), lambda_kl)) : rec;
  return ad::scale(total, 1.0 / batch);
}

}  // namespace lf::prior
