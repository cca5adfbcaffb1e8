#include "latentflow/prior/denoiser.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "latentflow/common/rng.hpp"

namespace lf::prior {

using ad::Tensor;
using ad::Var;

void DenoiserConfig::validate() const {
  if (latent_channels == 0 || base_channels == 0) throw std::invalid_argument("denoiser: channel counts must be positive");
  if (latent_size == 0 || latent_size % 4 != 0)
    throw std::invalid_argument("denoiser: latent size " + std::to_string(latent_size) + " must be a multiple of 4");
  if (time_dim < 2 || time_dim % 2 != 0) throw std::invalid_argument("denoiser: time_dim must be even");
}

namespace {

constexpr std::size_t kEmbedWidth = 64;

void add_conv(ad::ParameterSet& ps, const std::string& name, std::size_t cout, std::size_t cin, std::size_t k, Rng& rng,
              double gain = 1.0) {
  ps.add(name + ".w", ad::he_normal({cout, cin, k, k}, cin * k * k, rng, gain));
  ps.add(name + ".b", Tensor({cout}, 0.0));
}

void add_dense(ad::ParameterSet& ps, const std::string& name, std::size_t out, std::size_t in, Rng& rng,
               double gain = 1.0) {
  ps.add(name + ".w", ad::he_normal({out, in}, in, rng, gain));
  ps.add(name + ".b", Tensor({out}, 0.0));
}

void add_block(ad::ParameterSet& ps, const std::string& name, std::size_t cin, std::size_t cout, Rng& rng) {
  add_conv(ps, name + ".c1", cout, cin, 3, rng);
  add_dense(ps, name + ".t", cout, kEmbedWidth, rng, 0.5);
  add_conv(ps, name + ".c2", cout, cout, 3, rng, 0.5);
  if (cin != cout) add_conv(ps, name + ".skip", cout, cin, 1, rng);
}

Var conv(const ad::BoundParams& p, const std::string& name, Var x, std::size_t stride, std::size_t pad) {
  return ad::conv2d(x, p[name + ".w"], p[name + ".b"], stride, pad);
}

Var block(const ad::BoundParams& p, const std::string& name, Var x, Var temb) {
  Var h = ad::silu(conv(p, name + ".c1", x, 1, 1));
  h = ad::add_channelwise(h, ad::dense(temb, p[name + ".t.w"], p[name + ".t.b"]));
  h = conv(p, name + ".c2", ad::silu(h), 1, 1);
  Var skip = p.contains(name + ".skip.w") ? conv(p, name + ".skip", x, 1, 0) : x;
  return ad::add(h, skip);
}

}  // namespace

ad::ParameterSet init_denoiser(const DenoiserConfig& c, std::uint64_t seed) {
  c.validate();
  Rng rng(seed, "denoiser.init");
  const std::size_t b = c.base_channels;
  ad::ParameterSet ps;
  add_dense(ps, "time.l1", kEmbedWidth, c.time_dim, rng);
  add_dense(ps, "time.l2", kEmbedWidth, kEmbedWidth, rng);
  add_conv(ps, "in", b, c.latent_channels, 3, rng);
  add_block(ps, "down0", b, b, rng);
  add_conv(ps, "pool0", 2 * b, b, 4, rng);
  add_block(ps, "down1", 2 * b, 2 * b, rng);
  add_conv(ps, "pool1", 2 * b, 2 * b, 4, rng);
  add_block(ps, "mid", 2 * b, 2 * b, rng);
  ps.add("up1.w", ad::he_normal({2 * b, 2 * b, 4, 4}, 2 * b * 4, rng));
  ps.add("up1.b", Tensor({2 * b}, 0.0));
  add_block(ps, "dec1", 4 * b, 2 * b, rng);
  ps.add("up0.w", ad::he_normal({2 * b, b, 4, 4}, 2 * b * 4, rng));
  ps.add("up0.b", Tensor({b}, 0.0));
  add_block(ps, "dec0", 2 * b, b, rng);
  add_conv(ps, "out", c.latent_channels, b, 3, rng, 0.1);
  return ps;
}

Tensor timestep_embedding(const std::vector<std::size_t>& t, std::size_t dim) {
  const std::size_t half = dim / 2;
  Tensor out({t.size(), dim});
  for (std::size_t n = 0; n < t.size(); ++n)
    for (std::size_t k = 0; k < half; ++k) {
      const double freq = std::exp(-std::log(10000.0) * static_cast<double>(k) / static_cast<double>(half));
      const double arg = static_cast<double>(t[n]) * freq;
      out[n * dim + k] = std::sin(arg);
      out[n * dim + half + k] = std::cos(arg);
    }
  return out;
}

Var predict_noise(const ad::BoundParams& p, const DenoiserConfig& c, Var z_t, const std::vector<std::size_t>& t) {
  const auto& s = z_t.shape();
  if (s.size() != 4 || s[1] != c.latent_channels || s[2] != c.latent_size || s[3] != c.latent_size)
    throw std::invalid_argument("predict_noise: latent " + ad::shape_str(s) + " does not match the denoiser");
  if (t.size() != s[0]) throw std::invalid_argument("predict_noise: one timestep per sample is required");

  Var temb = z_t.tape().constant(timestep_embedding(t, c.time_dim));
  temb = ad::silu(ad::dense(temb, p["time.l1.w"], p["time.l1.b"]));
  temb = ad::dense(temb, p["time.l2.w"], p["time.l2.b"]);

  Var h = conv(p, "in", z_t, 1, 1);
  Var s0 = block(p, "down0", h, temb);
  Var s1 = block(p, "down1", conv(p, "pool0", s0, 2, 1), temb);
  Var m = block(p, "mid", conv(p, "pool1", s1, 2, 1), temb);
  Var u1 = ad::conv_transpose2d(m, p["up1.w"], p["up1.b"], 2, 1);
  u1 = block(p, "dec1", ad::concat({u1, s1}, 1), temb);
  Var u0 = ad::conv_transpose2d(u1, p["up0.w"], p["up0.b"], 2, 1);
  u0 = block(p, "dec0", ad::concat({u0, s0}, 1), temb);
  return conv(p, "out", ad::silu(u0), 1, 1);
}

}  // namespace lf::prior
