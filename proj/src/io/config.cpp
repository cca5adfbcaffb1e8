#include "latentflow/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lf::io {

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys{
      // grid and boundary conditions
      {"nx", "32", "cells in x"},
      {"ny", "32", "cells in y"},
      {"x_min", "-50", "domain left edge (m)"},
      {"x_max", "50", "domain right edge (m)"},
      {"y_min", "-50", "domain bottom edge (m)"},
      {"y_max", "50", "domain top edge (m)"},
      {"left_head", "1", "Dirichlet head on the left face (m)"},
      {"right_head", "0", "Dirichlet head on the right face (m)"},
      // dataset
      {"kind", "gaussian", "field family: gaussian | bimaterial"},
      {"n", "2000", "number of fields to generate"},
      {"n_train", "0", "training split size (0: 70% of n)"},
      {"n_val", "0", "validation split size (0: 20% of n)"},
      {"n_test", "0", "test split size (0: remainder)"},
      {"k_floor", "0.01", "offset added to Gaussian K before taking logs"},
      {"correlation_lengths", "0.1,0.2,0.3,0.4,0.5,0.6,0.7", "Gaussian correlation lengths, cycled over samples"},
      {"matern_length", "50", "Matern length of the bimaterial phase fields (m)"},
      {"split_length", "200", "Matern length of the bimaterial splitting field (m)"},
      {"matern_sigma", "1", "standard deviation of each phase's ln K fluctuation"},
      {"dataset_dir", "", "dataset directory (default <out>/dataset)"},
      // prior
      {"prior_dir", "", "checkpoint directory (default <out>/prior)"},
      {"vae_channels", "16,32,64", "encoder channels per stride-2 level"},
      {"latent_channels", "4", "latent channels"},
      {"lambda_kl", "1e-4", "KL weight in the VAE loss"},
      {"vae_lr", "1e-3", "VAE Adam learning rate"},
      {"vae_epochs", "60", "VAE epochs"},
      {"vae_batch", "16", "VAE batch size"},
      {"diffusion_lr", "1e-3", "denoiser Adam learning rate"},
      {"diffusion_epochs", "200", "denoiser epochs"},
      {"diffusion_batch", "32", "denoiser batch size"},
      {"base_channels", "32", "U-Net base channels"},
      {"T", "1000", "diffusion steps"},
      {"beta_start", "1e-4", "first beta of the linear schedule"},
      {"beta_end", "2e-2", "last beta of the linear schedule"},
      {"resume", "false", "resume training from the checkpoint directory"},
      // sampling
      {"sample_steps", "50", "DDIM steps for sampling"},
      {"n_samples", "16", "fields drawn by the sample command"},
      // inversion
      {"prior_mode", "latent-diffusion", "latent-diffusion | vae-only | pixel-space"},
      {"beta", "1e-3", "latent regularization weight"},
      {"eta", "1e-1", "latent learning rate"},
      {"optimizer", "adam", "adam | gd"},
      {"max_iter", "500", "maximum inversion iterations"},
      {"ddim_steps", "20", "DDIM steps inside the inversion"},
      {"patience", "50", "early-stop window (iterations)"},
      {"rel_tol", "1e-8", "early-stop relative loss change"},
      {"k_obs_weight", "0", "weight of the ln K misfit at conductivity observations"},
      {"k_obs_layout", "0", "m for m x m conductivity observations (0: none)"},
      {"smoothing", "0", "Tikhonov weight for pixel-space inversion"},
      {"obs_layout", "16", "m for m x m head observations"},
      {"truth", "", "ground-truth LDF2 file (default: test split sample truth_index)"},
      {"truth_index", "0", "test-split index used when truth is unset"},
      {"log_domain", "auto", "metrics in ln K: auto | true | false (auto: bimaterial)"},
      // sweeps
      {"sweep_kind", "observation-density", "seed-sensitivity | observation-density | method-comparison"},
      {"layouts", "3,5,12,16", "observation layouts for sweeps"},
      {"n_seeds", "5", "seeds per sweep"},
      {"methods", "latent-diffusion", "comma list of prior modes for sweeps"},
      {"workers", "1", "concurrent sweep runs"},
      // evaluation and plotting
      {"pred", "", "predicted conductivity (evaluate)"},
      {"pred_h", "", "predicted head (evaluate; solved from pred when empty)"},
      {"samples_dir", "", "directory of generated LDF2 fields for FID/KID (evaluate)"},
      {"extractor_seed", "7", "seed of the FID/KID feature extractor"},
      {"fid_shrinkage", "0", "covariance shrinkage for FID (needed when a set has <= 64 fields)"},
      {"field", "", "LDF2 file to plot"},
      {"plot_log", "false", "plot ln K instead of K"},
      {"plot_scale", "8", "pixels per cell in plots"},
  };
  return keys;
}

RunConfig::RunConfig() {
  for (const auto& k : config_keys()) values_[k.key] = k.default_value;
}

const KeyInfo& RunConfig::info(const std::string& key) const {
  const auto& keys = config_keys();
  const auto it = std::find_if(keys.begin(), keys.end(), [&](const KeyInfo& k) { return k.key == key; });
  if (it == keys.end()) throw std::invalid_argument("unknown configuration key '" + key + "'");
  return *it;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  info(key);
  values_[key] = value;
  explicit_[key] = true;
}

void RunConfig::set_assignment(const std::string& a) {
  const auto eq = a.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + a + "'");
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  set(trim(a.substr(0, eq)), trim(a.substr(eq + 1)));
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      set_assignment(line);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  RunConfig c;
  c.merge_file(path);
  return c;
}

bool RunConfig::is_set(const std::string& key) const {
  info(key);
  return explicit_.count(key) > 0;
}

std::string RunConfig::str(const std::string& key) const {
  info(key);
  return values_.at(key);
}

double RunConfig::real(const std::string& key) const {
  const auto s = str(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("configuration key '" + key + "' expects a number, got '" + s + "'");
  }
}

std::int64_t RunConfig::integer(const std::string& key) const {
  const auto s = str(key);
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("configuration key '" + key + "' expects an integer, got '" + s + "'");
  return v;
}

std::size_t RunConfig::count(const std::string& key) const {
  const auto v = integer(key);
  if (v < 0) throw std::invalid_argument("configuration key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

std::uint64_t RunConfig::u64(const std::string& key) const {
  const auto s = str(key);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("configuration key '" + key + "' expects an unsigned integer, got '" + s + "'");
  return v;
}

bool RunConfig::flag(const std::string& key) const {
  const auto s = str(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("configuration key '" + key + "' expects true or false, got '" + s + "'");
}

std::vector<std::string> RunConfig::words(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(str(key));
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::size_t> RunConfig::counts(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& w : words(key)) {
    std::size_t v = 0;
    const auto res = std::from_chars(w.data(), w.data() + w.size(), v);
    if (res.ec != std::errc() || res.ptr != w.data() + w.size())
      throw std::invalid_argument("configuration key '" + key + "' expects a list of counts, got '" + str(key) + "'");
    out.push_back(v);
  }
  return out;
}

std::string config_help() {
  std::ostringstream os;
  os << "Configuration keys (key = value in --config files, or --set key=value):\n";
  for (const auto& k : config_keys()) {
    os << "  " << k.key;
    for (std::size_t pad = k.key.size(); pad < 22; ++pad) os << ' ';
    os << k.help << " [default: " << (k.default_value.empty() ? "\"\"" : k.default_value) << "]\n";
  }
  return os.str();
}

}  // namespace lf::io
