#include "latentflow/io/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "latentflow/common/rng.hpp"
#include "latentflow/fvm/field_io.hpp"
#include "latentflow/fvm/solver.hpp"
#include "latentflow/io/csv.hpp"
#include "latentflow/metrics/distribution.hpp"
#include "latentflow/metrics/embedding.hpp"
#include "latentflow/metrics/errors.hpp"
#include "latentflow/prior/training.hpp"

namespace lf::io {

namespace fs = std::filesystem;

namespace {

void note(const Context& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n';
}

fs::path path_or(const RunConfig& c, const std::string& key, const fs::path& fallback) {
  const auto v = c.str(key);
  return v.empty() ? fallback : fs::path(v);
}

synth::DatasetManifest require_dataset(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.txt"))
    throw std::runtime_error("dataset not found: " + dir.string() + " (no manifest.txt; run generate first)");
  return synth::load_manifest(dir);
}

std::vector<ad::Tensor> encode_all(const prior::FieldCodec& codec, const std::vector<fvm::ScalarField2D>& fields) {
  std::vector<ad::Tensor> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(codec.encode_field(f));
  return out;
}

std::vector<ad::Tensor> scaled(std::vector<ad::Tensor> latents, double s) {
  for (auto& t : latents)
    for (double& v : t.values()) v *= s;
  return latents;
}

prior::VaeConfig vae_config(const RunConfig& c) {
  const auto g = grid_spec(c);
  if (g.nx != g.ny) throw std::invalid_argument("the VAE needs a square grid, got nx=" + std::to_string(g.nx) +
                                                " ny=" + std::to_string(g.ny));
  prior::VaeConfig v;
  v.resolution = g.nx;
  v.channels = c.counts("vae_channels");
  v.latent_channels = c.count("latent_channels");
  v.validate();
  return v;
}

void check_grid(const prior::LatentPrior& p, const fvm::GridSpec& g) {
  if (p.vae_config.resolution != g.nx || p.vae_config.resolution != g.ny)
    throw std::invalid_argument("prior resolution " + std::to_string(p.vae_config.resolution) +
                                " does not match grid " + std::to_string(g.nx) + "x" + std::to_string(g.ny));
}

// Truth for invert/evaluate: the `truth` key or test-split sample `truth_index`.
fvm::ScalarField2D load_truth(const Context& ctx) {
  const auto t = ctx.config.str("truth");
  if (!t.empty()) return fvm::load_field(t);
  const auto dir = dataset_dir(ctx);
  const auto manifest = require_dataset(dir);
  const auto test = manifest.split("test");
  const auto idx = ctx.config.count("truth_index");
  if (idx >= test.size())
    throw std::out_of_range("truth_index " + std::to_string(idx) + " outside the test split of " +
                            std::to_string(test.size()));
  return fvm::load_field(dir / test[idx]->filename);
}

double floor_for(const Context& ctx) {
  const auto dir = dataset_dir(ctx);
  if (fs::exists(dir / "manifest.txt")) return synth::load_manifest(dir).stats.floor;
  if (fs::exists(prior_dir(ctx) / prior::kVaeFile)) return prior::load_prior(prior_dir(ctx), false).codec.stats().floor;
  return synth::log_floor(dataset_config(ctx));
}

bool log_domain(const Context& ctx, double floor) {
  const auto v = ctx.config.str("log_domain");
  if (v == "auto") return floor == 0.0;  // bimaterial fields carry no floor
  return ctx.config.flag("log_domain");
}

fvm::ScalarField2D solve_with_floor(fvm::ScalarField2D K, double floor, const fvm::BoundaryConditions& bc) {
  for (double& v : K.values()) v += floor;
  return fvm::solve_head(fvm::assemble_system(K, bc));
}

prior::LatentPrior prior_for_mode(const Context& ctx, inversion::PriorMode mode) {
  if (mode != inversion::PriorMode::PixelSpace)
    return prior::load_prior(prior_dir(ctx), mode == inversion::PriorMode::LatentDiffusion);
  // Pixel-space inversion only needs the normalization.
  prior::LatentPrior p;
  if (fs::exists(prior_dir(ctx) / prior::kVaeFile)) {
    p.codec = prior::load_prior(prior_dir(ctx), false).codec;
  } else {
    p.codec = prior::FieldCodec(require_dataset(dataset_dir(ctx)).stats);
  }
  return p;
}

}  // namespace

fvm::GridSpec grid_spec(const RunConfig& c) {
  fvm::GridSpec g;
  g.nx = c.count("nx");
  g.ny = c.count("ny");
  g.x_min = c.real("x_min");
  g.x_max = c.real("x_max");
  g.y_min = c.real("y_min");
  g.y_max = c.real("y_max");
  if (g.nx == 0 || g.ny == 0) throw std::invalid_argument("nx and ny must be positive");
  if (!(g.x_max > g.x_min) || !(g.y_max > g.y_min)) throw std::invalid_argument("domain extents must be increasing");
  return g;
}

fvm::BoundaryConditions boundary(const RunConfig& c) {
  fvm::BoundaryConditions bc;
  bc.left_head = c.real("left_head");
  bc.right_head = c.real("right_head");
  return bc;
}

fs::path dataset_dir(const Context& ctx) { return path_or(ctx.config, "dataset_dir", ctx.out / "dataset"); }
fs::path prior_dir(const Context& ctx) { return path_or(ctx.config, "prior_dir", ctx.out / "prior"); }

synth::DatasetConfig dataset_config(const Context& ctx) {
  const auto& c = ctx.config;
  synth::DatasetConfig d;
  d.kind = synth::parse_field_kind(c.str("kind"));
  d.grid = grid_spec(c);
  d.n_total = c.count("n");
  d.master_seed = ctx.seed;
  d.k_floor = c.real("k_floor");
  std::size_t tr = c.count("n_train"), va = c.count("n_val"), te = c.count("n_test");
  if (tr == 0 && va == 0 && te == 0) {
    tr = static_cast<std::size_t>(std::llround(0.7 * static_cast<double>(d.n_total)));
    va = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(d.n_total)));
    va = std::min(va, d.n_total - tr);
    te = d.n_total - tr - va;
  }
  d.splits = {tr, va, te};
  d.correlation_lengths.clear();
  for (const auto& w : c.words("correlation_lengths")) d.correlation_lengths.push_back(synth::parse_double(w, "correlation_lengths"));
  if (d.correlation_lengths.empty()) throw std::invalid_argument("correlation_lengths is empty");
  d.bimaterial.matern_length = c.real("matern_length");
  d.bimaterial.split_length = c.real("split_length");
  d.bimaterial.matern_sigma = c.real("matern_sigma");
  return d;
}

inversion::InversionConfig inversion_config(const Context& ctx) {
  const auto& c = ctx.config;
  inversion::InversionConfig ic;
  ic.beta = c.real("beta");
  ic.eta = c.real("eta");
  ic.max_iter = c.count("max_iter");
  ic.ddim_steps = c.count("ddim_steps");
  ic.mode = inversion::parse_prior_mode(c.str("prior_mode"));
  ic.seed = derive_seed(ctx.seed, "inversion");
  const auto opt = c.str("optimizer");
  if (opt != "adam" && opt != "gd") throw std::invalid_argument("optimizer must be adam or gd, got '" + opt + "'");
  ic.adam = opt == "adam";
  ic.k_obs_weight = c.real("k_obs_weight");
  ic.smoothing = c.real("smoothing");
  ic.patience = c.count("patience");
  ic.rel_tol = c.real("rel_tol");
  ic.grid = grid_spec(c);
  ic.bc = boundary(c);
  ic.validate();
  return ic;
}

synth::DatasetManifest cmd_generate(const Context& ctx) {
  const auto cfg = dataset_config(ctx);
  const auto dir = dataset_dir(ctx);
  auto m = synth::build_dataset(cfg, dir);
  note(ctx, "generate: " + std::to_string(m.entries.size()) + " " + synth::to_string(m.kind) + " fields in " +
                dir.string());
  return m;
}

prior::LatentPrior cmd_train_vae(const Context& ctx) {
  const auto& c = ctx.config;
  const auto data = dataset_dir(ctx);
  const auto manifest = require_dataset(data);
  prior::LatentPrior p;
  p.codec = prior::FieldCodec(manifest.stats);
  p.vae_config = vae_config(c);
  if (manifest.nx != p.vae_config.resolution || manifest.ny != p.vae_config.resolution)
    throw std::invalid_argument("dataset grid " + std::to_string(manifest.nx) + "x" + std::to_string(manifest.ny) +
                                " does not match nx/ny " + std::to_string(p.vae_config.resolution));
  const auto train = encode_all(p.codec, synth::load_split(data, manifest, "train"));
  const auto val = encode_all(p.codec, synth::load_split(data, manifest, "val"));

  prior::TrainConfig tc;
  tc.lr = c.real("vae_lr");
  tc.epochs = c.count("vae_epochs");
  tc.batch = c.count("vae_batch");
  tc.lambda_kl = c.real("lambda_kl");
  tc.seed = ctx.seed;
  tc.checkpoint_dir = prior_dir(ctx);
  tc.name = "vae_train";
  tc.resume = c.flag("resume");
  auto res = prior::train_vae(train, val, p.vae_config, tc);
  p.vae = std::move(res.params);
  p.latent_scale = prior::latent_scale_factor(prior::encode_means(p.vae, p.vae_config, train));

  const auto dir = prior_dir(ctx);
  prior::save_vae(dir / prior::kVaeFile, p);
  // A denoiser trained on an earlier VAE no longer matches the latent space.
  if (fs::remove(dir / prior::kDenoiserFile)) note(ctx, "train-vae: removed stale " + (dir / prior::kDenoiserFile).string());
  note(ctx, "train-vae: " + std::to_string(res.log.size()) + " epochs, final val loss " +
                synth::format_double(res.log.empty() ? NAN : res.log.back().val_loss) + ", latent scale " +
                synth::format_double(p.latent_scale));
  return p;
}

prior::LatentPrior cmd_train_diffusion(const Context& ctx) {
  const auto& c = ctx.config;
  const auto dir = prior_dir(ctx);
  if (!fs::exists(dir / prior::kVaeFile))
    throw std::runtime_error("diffusion training needs a trained VAE at " + (dir / prior::kVaeFile).string() +
                             "; run train-vae first");
  auto p = prior::load_prior(dir, false);
  const auto data = dataset_dir(ctx);
  const auto manifest = require_dataset(data);
  const auto train_u = encode_all(p.codec, synth::load_split(data, manifest, "train"));
  const auto val_u = encode_all(p.codec, synth::load_split(data, manifest, "val"));
  const auto train = scaled(prior::encode_means(p.vae, p.vae_config, train_u), p.latent_scale);
  const auto val = scaled(prior::encode_means(p.vae, p.vae_config, val_u), p.latent_scale);

  p.schedule_config = {c.count("T"), c.real("beta_start"), c.real("beta_end")};
  p.schedule = prior::make_schedule(p.schedule_config.T, p.schedule_config.beta_start, p.schedule_config.beta_end);
  p.denoiser_config = p.matching_denoiser_config(c.count("base_channels"));

  prior::TrainConfig tc;
  tc.lr = c.real("diffusion_lr");
  tc.epochs = c.count("diffusion_epochs");
  tc.batch = c.count("diffusion_batch");
  tc.seed = ctx.seed;
  tc.checkpoint_dir = dir;
  tc.name = "denoiser_train";
  tc.resume = c.flag("resume");
  auto res = prior::train_diffusion(train, val, p.denoiser_config, p.schedule, tc);
  p.denoiser = std::move(res.params);
  p.has_denoiser = true;
  prior::save_denoiser(dir / prior::kDenoiserFile, p);
  note(ctx, "train-diffusion: " + std::to_string(res.log.size()) + " epochs, final val loss " +
                synth::format_double(res.log.empty() ? NAN : res.log.back().val_loss));
  return p;
}

std::vector<fs::path> cmd_sample(const Context& ctx) {
  const auto& c = ctx.config;
  const auto p = prior::load_prior(prior_dir(ctx), true);
  const auto grid = grid_spec(c);
  check_grid(p, grid);
  const auto n = c.count("n_samples");
  const auto steps = c.count("sample_steps");
  const auto dir = ctx.out / "samples";
  fs::create_directories(dir);
  std::vector<fs::path> paths(n);
  for (std::size_t k = 0; k < n; ++k) {
    Rng rng(ctx.seed, "sample", k);
    ad::Tensor z(p.latent_shape());
    rng.fill_normal(z.storage());
    char name[32];
    std::snprintf(name, sizeof name, "sample_%04zu.ldf2", k);
    paths[k] = dir / name;
    fvm::save_field(paths[k], prior::sample_field(p, z, steps, grid));
  }
  note(ctx, "sample: " + std::to_string(n) + " fields in " + dir.string());
  return paths;
}

inversion::InversionResult cmd_invert(const Context& ctx) {
  const auto& c = ctx.config;
  const auto ic = inversion_config(ctx);
  const auto p = prior_for_mode(ctx, ic.mode);
  if (ic.mode != inversion::PriorMode::PixelSpace) check_grid(p, ic.grid);
  const auto truth = load_truth(ctx);
  if (truth.nx() != ic.grid.nx || truth.ny() != ic.grid.ny)
    throw std::invalid_argument("truth field does not match the configured grid");
  const double floor = p.codec.stats().floor;
  const auto h_true = solve_with_floor(truth, floor, ic.bc);
  auto obs = inversion::observe_heads(h_true, c.count("obs_layout"));
  if (const auto mk = c.count("k_obs_layout")) inversion::add_conductivity_observations(obs, truth, mk);

  auto res = inversion::run_inversion(obs, ic, p);
  inversion::attach_metrics(res, truth, h_true, log_domain(ctx, floor));
  const auto dir = ctx.out / "inversion";
  inversion::write_result_bundle(dir, res);
  note(ctx, "invert: " + std::to_string(res.iterations) + " iterations, best " + std::to_string(res.best_iter) +
                ", eps_K " + synth::format_double(res.metrics->eps_K) + ", eps_h " +
                synth::format_double(res.metrics->eps_h) + (res.aborted ? ", aborted: " + res.abort_reason : "") +
                " -> " + dir.string());
  return res;
}

inversion::SweepResult cmd_sweep(const Context& ctx) {
  const auto& c = ctx.config;
  inversion::SweepConfig sc;
  sc.kind = inversion::parse_sweep_kind(c.str("sweep_kind"));
  sc.layouts = c.counts("layouts");
  sc.n_seeds = c.count("n_seeds");
  sc.methods.clear();
  for (const auto& w : c.words("methods")) sc.methods.push_back(inversion::parse_prior_mode(w));
  sc.inversion = inversion_config(ctx);
  sc.workers = c.count("workers");
  sc.conductivity_layout = c.count("k_obs_layout");

  // Load the richest prior any requested method needs.
  auto mode = inversion::PriorMode::PixelSpace;
  for (auto m : sc.methods)
    if (m == inversion::PriorMode::LatentDiffusion || mode == inversion::PriorMode::PixelSpace) mode = m;
  const auto p = prior_for_mode(ctx, mode);
  if (mode != inversion::PriorMode::PixelSpace) check_grid(p, sc.inversion.grid);
  sc.log_domain = log_domain(ctx, p.codec.stats().floor);

  const auto data = dataset_dir(ctx);
  const auto truths = synth::load_split(data, require_dataset(data), "test");
  auto res = inversion::experiment_sweep(sc, truths, p);
  const auto dir = ctx.out / "sweep";
  inversion::write_sweep(dir, res, sc.kind);
  const auto failed = std::count_if(res.runs.begin(), res.runs.end(), [](const auto& r) { return !r.ok; });
  note(ctx, "sweep: " + std::to_string(res.runs.size()) + " runs (" + std::to_string(failed) + " failed) -> " +
                dir.string());
  return res;
}

std::vector<MetricRow> cmd_evaluate(const Context& ctx) {
  const auto& c = ctx.config;
  std::vector<MetricRow> rows;
  const double floor = floor_for(ctx);
  const bool logd = log_domain(ctx, floor);

  if (!c.str("pred").empty()) {
    const auto pred = fvm::load_field(c.str("pred"));
    const auto truth = load_truth(ctx);
    const auto bc = boundary(c);
    const auto h_true = solve_with_floor(truth, floor, bc);
    const auto h_pred = c.str("pred_h").empty() ? solve_with_floor(pred, floor, bc) : fvm::load_field(c.str("pred_h"));
    const auto m = metrics::evaluate_fields(pred, truth, h_pred, h_true, logd);
    const std::string run = fs::path(c.str("pred")).stem().string();
    rows.push_back({run, "eps_K", m.eps_K, ""});
    rows.push_back({run, "eps_h", m.eps_h, ""});
    rows.push_back({run, "eps_K_tilde", m.eps_K_tilde, ""});
    rows.push_back({run, "ssim", m.ssim, ""});
  }
  if (!c.str("samples_dir").empty()) {
    const fs::path sdir = c.str("samples_dir");
    if (!fs::is_directory(sdir)) throw std::runtime_error("samples_dir not found: " + sdir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(sdir))
      if (e.path().extension() == ".ldf2") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .ldf2 files in " + sdir.string());
    std::vector<fvm::ScalarField2D> gen;
    for (const auto& f : files) gen.push_back(fvm::load_field(f));
    const auto data = dataset_dir(ctx);
    auto real = synth::load_split(data, require_dataset(data), "test");
    auto domain = [&](std::vector<fvm::ScalarField2D>& fs) {
      if (!logd) return;
      for (auto& f : fs) f = metrics::log_field(f);
    };
    domain(gen);
    domain(real);
    const auto seed = c.u64("extractor_seed");
    const metrics::FeatureExtractor extract(seed);
    const auto er = extract(real), eg = extract(gen);
    const std::string s = std::to_string(seed);
    rows.push_back({"generative", "fid", metrics::fid(er, eg, {c.real("fid_shrinkage")}), s});
    rows.push_back({"generative", "kid", metrics::kid(er, eg), s});
  }
  if (rows.empty()) throw std::invalid_argument("evaluate: set pred (field metrics) and/or samples_dir (FID/KID)");

  fs::create_directories(ctx.out);
  CsvWriter w(ctx.out / "metrics.csv");
  w.values("run", "metric", "value", "extractor_seed");
  for (const auto& r : rows) w.values(r.run, r.metric, r.value, r.extractor_seed);
  for (const auto& r : rows) note(ctx, "evaluate: " + r.run + " " + r.metric + " = " + synth::format_double(r.value));
  return rows;
}

Heatmap cmd_plot(const Context& ctx, const fs::path& field, const fs::path& png) {
  PlotOptions opt;
  opt.log_values = ctx.config.flag("plot_log");
  opt.scale = ctx.config.count("plot_scale");
  auto hm = plot_field(fvm::load_field(field), png, opt);
  note(ctx, "plot: " + png.string() + " range [" + synth::format_double(hm.vmin) + ", " +
                synth::format_double(hm.vmax) + "]");
  return hm;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conductivity reconstruction with a latent diffusion prior and an adjoint Darcy solver"};
  app.require_subcommand(1);
  app.footer(config_help());

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--set", sets, "override a configuration key (key=value), repeatable");

  std::size_t n = 0;
  auto* gen = app.add_subcommand("generate", "synthesize a conductivity dataset");
  gen->add_option("--n", n, "number of fields (overrides the n key)");
  auto* tv = app.add_subcommand("train-vae", "train the VAE on the dataset");
  auto* td = app.add_subcommand("train-diffusion", "train the latent denoiser (needs a trained VAE)");
  auto* sa = app.add_subcommand("sample", "draw fields from the trained prior");
  auto* inv = app.add_subcommand("invert", "reconstruct K from head observations");
  auto* sw = app.add_subcommand("sweep", "run a seeds x layouts x methods experiment");
  auto* ev = app.add_subcommand("evaluate", "write metrics.csv for a prediction and/or generated samples");
  std::string pred, truth, samples;
  ev->add_option("--pred", pred, "predicted conductivity");
  ev->add_option("--truth", truth, "ground-truth conductivity");
  ev->add_option("--samples", samples, "directory of generated fields for FID/KID");
  auto* pl = app.add_subcommand("plot", "render an LDF2 field to PNG plus CSV");
  std::string field, png;
  bool plot_log = false;
  pl->add_option("field", field, "LDF2 field")->required();
  pl->add_option("png", png, "output PNG (default <out>/<field>.png)");
  pl->add_flag("--log", plot_log, "plot ln K");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() ? e.get_exit_code() : 2;
  }

  try {
    Context ctx;
    if (!config_path.empty()) ctx.config.merge_file(config_path);
    for (const auto& s : sets) ctx.config.set_assignment(s);
    ctx.out = out_dir;
    ctx.seed = seed;
    ctx.log = &out;
    if (gen->parsed()) {
      if (gen->count("--n")) ctx.config.set("n", std::to_string(n));
      cmd_generate(ctx);
    } else if (tv->parsed()) {
      cmd_train_vae(ctx);
    } else if (td->parsed()) {
      cmd_train_diffusion(ctx);
    } else if (sa->parsed()) {
      cmd_sample(ctx);
    } else if (inv->parsed()) {
      cmd_invert(ctx);
    } else if (sw->parsed()) {
      cmd_sweep(ctx);
    } else if (ev->parsed()) {
      if (!pred.empty()) ctx.config.set("pred", pred);
      if (!truth.empty()) ctx.config.set("truth", truth);
      if (!samples.empty()) ctx.config.set("samples_dir", samples);
      cmd_evaluate(ctx);
    } else if (pl->parsed()) {
      if (plot_log) ctx.config.set("plot_log", "true");
      fs::path target = png.empty() ? ctx.out / fs::path(field).stem().concat(".png") : fs::path(png);
      cmd_plot(ctx, field, target);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace lf::io
