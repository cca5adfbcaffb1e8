#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "latentflow/inversion/sweep.hpp"
#include "latentflow/io/config.hpp"
#include "latentflow/io/plot.hpp"
#include "latentflow/prior/latent_prior.hpp"
#include "latentflow/synth/dataset.hpp"

namespace lf::io {

/// Everything a command needs: configuration, output root and master seed.
struct Context {
  RunConfig config;
  std::filesystem::path out = ".";
  std::uint64_t seed = 0;
  std::ostream* log = nullptr;  // progress lines; silent when null
};

fvm::GridSpec grid_spec(const RunConfig& config);
fvm::BoundaryConditions boundary(const RunConfig& config);
synth::DatasetConfig dataset_config(const Context& ctx);
inversion::InversionConfig inversion_config(const Context& ctx);
std::filesystem::path dataset_dir(const Context& ctx);
std::filesystem::path prior_dir(const Context& ctx);

synth::DatasetManifest cmd_generate(const Context& ctx);
/// Writes <prior_dir>/vae.ldad (plus vae_train checkpoints and log).
prior::LatentPrior cmd_train_vae(const Context& ctx);
/// Requires <prior_dir>/vae.ldad; writes denoiser.ldad.
prior::LatentPrior cmd_train_diffusion(const Context& ctx);
/// n_samples DDIM draws under <out>/samples.
std::vector<std::filesystem::path> cmd_sample(const Context& ctx);
/// Result bundle under <out>/inversion.
inversion::InversionResult cmd_invert(const Context& ctx);
/// runs.csv and summary.csv under <out>/sweep.
inversion::SweepResult cmd_sweep(const Context& ctx);

struct MetricRow {
  std::string run;
  std::string metric;
  double value = 0.0;
  std::string extractor_seed;  // empty for field metrics
};
/// <out>/metrics.csv with one row per (run, metric, value).
std::vector<MetricRow> cmd_evaluate(const Context& ctx);
Heatmap cmd_plot(const Context& ctx, const std::filesystem::path& field, const std::filesystem::path& png);

/// Parses arguments (without the program name) and runs a subcommand. Returns the exit code;
/// errors are reported on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lf::io
