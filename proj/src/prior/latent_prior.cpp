#include "latentflow/prior/latent_prior.hpp"

#include <stdexcept>
#include <string>

#include "latentflow/ad/checkpoint.hpp"
#include "latentflow/prior/sampler.hpp"

namespace lf::prior {

namespace fs = std::filesystem;
using ad::Tensor;

DenoiserConfig LatentPrior::matching_denoiser_config(std::size_t base_channels) const {
  DenoiserConfig c;
  c.latent_channels = vae_config.latent_channels;
  c.latent_size = vae_config.latent_size();
  c.base_channels = base_channels;
  return c;
}

namespace {

Tensor vec(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor({n}, std::move(v));
}

std::size_t as_size(double v, const char* what) {
  if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
    throw std::runtime_error(std::string("checkpoint meta ") + what + " is not a count");
  return static_cast<std::size_t>(v);
}

const Tensor& meta(const ad::ParameterSet& ps, const std::string& name, const fs::path& path, std::size_t size) {
  if (!ps.contains(name)) throw std::runtime_error(path.string() + ": missing " + name);
  const Tensor& t = ps.at(name);
  if (size && t.size() != size) throw std::runtime_error(path.string() + ": malformed " + name);
  return t;
}

ad::ParameterSet strip_meta(const ad::ParameterSet& ps) {
  ad::ParameterSet out;
  for (const auto& name : ps.names())
    if (name.rfind("meta.", 0) != 0) out.add(name, ps.at(name));
  return out;
}

}  // namespace

void save_vae(const fs::path& path, const LatentPrior& prior) {
  ad::ParameterSet ps;
  const auto& s = prior.codec.stats();
  ps.add("meta.codec", vec({s.floor, s.log_min, s.log_max}));
  ps.add("meta.vae.resolution", Tensor::scalar(static_cast<double>(prior.vae_config.resolution)));
  ps.add("meta.vae.latent_channels", Tensor::scalar(static_cast<double>(prior.vae_config.latent_channels)));
  std::vector<double> ch(prior.vae_config.channels.begin(), prior.vae_config.channels.end());
  ps.add("meta.vae.channels", vec(ch));
  ps.add("meta.latent_scale", Tensor::scalar(prior.latent_scale));
  for (const auto& name : prior.vae.names()) ps.add(name, prior.vae.at(name));
  ad::save_checkpoint(path, ps);
}

void save_denoiser(const fs::path& path, const LatentPrior& prior) {
  const auto& c = prior.denoiser_config;
  ad::ParameterSet ps;
  ps.add("meta.denoiser", vec({static_cast<double>(c.latent_channels), static_cast<double>(c.latent_size),
                               static_cast<double>(c.base_channels), static_cast<double>(c.time_dim)}));
  const auto& sc = prior.schedule_config;
  ps.add("meta.schedule", vec({static_cast<double>(sc.T), sc.beta_start, sc.beta_end}));
  for (const auto& name : prior.denoiser.names()) ps.add(name, prior.denoiser.at(name));
  ad::save_checkpoint(path, ps);
}

void save_prior(const fs::path& dir, const LatentPrior& prior) {
  fs::create_directories(dir);
  save_vae(dir / kVaeFile, prior);
  if (prior.has_denoiser) save_denoiser(dir / kDenoiserFile, prior);
}

LatentPrior load_prior(const fs::path& dir, bool require_denoiser) {
  LatentPrior prior;
  const auto vae_path = dir / kVaeFile;
  if (!fs::exists(vae_path)) throw std::runtime_error("VAE checkpoint not found: " + vae_path.string());
  const auto vps = ad::load_checkpoint(vae_path);
  const auto& codec = meta(vps, "meta.codec", vae_path, 3);
  prior.codec = FieldCodec(synth::LogStats{codec[0], codec[1], codec[2]});
  prior.vae_config.resolution = as_size(meta(vps, "meta.vae.resolution", vae_path, 1)[0], "resolution");
  prior.vae_config.latent_channels = as_size(meta(vps, "meta.vae.latent_channels", vae_path, 1)[0], "latent_channels");
  prior.vae_config.channels.clear();
  for (double v : meta(vps, "meta.vae.channels", vae_path, 0).values()) prior.vae_config.channels.push_back(as_size(v, "channels"));
  prior.vae_config.validate();
  prior.latent_scale = meta(vps, "meta.latent_scale", vae_path, 1)[0];
  prior.vae = strip_meta(vps);

  const auto den_path = dir / kDenoiserFile;
  if (!fs::exists(den_path)) {
    if (require_denoiser) throw std::runtime_error("denoiser checkpoint not found: " + den_path.string());
    return prior;
  }
  const auto dps = ad::load_checkpoint(den_path);
  const auto& dc = meta(dps, "meta.denoiser", den_path, 4);
  prior.denoiser_config = {as_size(dc[0], "latent_channels"), as_size(dc[1], "latent_size"),
                           as_size(dc[2], "base_channels"), as_size(dc[3], "time_dim")};
  prior.denoiser_config.validate();
  const auto& sc = meta(dps, "meta.schedule", den_path, 3);
  prior.schedule_config = {as_size(sc[0], "T"), sc[1], sc[2]};
  prior.schedule = make_schedule(prior.schedule_config.T, sc[1], sc[2]);
  prior.denoiser = strip_meta(dps);
  prior.has_denoiser = true;
  if (prior.denoiser_config.latent_channels != prior.vae_config.latent_channels ||
      prior.denoiser_config.latent_size != prior.vae_config.latent_size())
    throw std::runtime_error(dir.string() + ": denoiser latent shape does not match the VAE");
  return prior;
}

Tensor sample_unit(const LatentPrior& prior, const Tensor& z_T, std::size_t n_steps) {
  if (!prior.has_denoiser) throw std::logic_error("sample: prior has no denoiser");
  ad::Tape tape;
  ad::BoundParams vae(tape, prior.vae, false), den(tape, prior.denoiser, false);
  auto z0 = ddim_chain(network_predictor(den, prior.denoiser_config), tape.constant(z_T), prior.schedule, n_steps);
  return decode_scaled(vae, prior.vae_config, z0, prior.latent_scale).value();
}

Tensor decode_unit(const LatentPrior& prior, const Tensor& z0_scaled) {
  ad::Tape tape;
  ad::BoundParams vae(tape, prior.vae, false);
  return decode_scaled(vae, prior.vae_config, tape.constant(z0_scaled), prior.latent_scale).value();
}

fvm::ScalarField2D sample_field(const LatentPrior& prior, const Tensor& z_T, std::size_t n_steps,
                                const fvm::GridSpec& grid) {
  return prior.codec.reported_conductivity(prior.codec.solver_conductivity(sample_unit(prior, z_T, n_steps), grid));
}

}  // namespace lf::prior
