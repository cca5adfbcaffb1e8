#include "latentflow/inversion/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "latentflow/common/rng.hpp"
#include "latentflow/fvm/solver.hpp"
#include "latentflow/synth/dataset.hpp"

namespace lf::inversion {

namespace fs = std::filesystem;

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::SeedSensitivity: return "seed-sensitivity";
    case SweepKind::ObservationDensity: return "observation-density";
    case SweepKind::MethodComparison: return "method-comparison";
  }
  return "?";
}

SweepKind parse_sweep_kind(const std::string& text) {
  if (text == "seed-sensitivity") return SweepKind::SeedSensitivity;
  if (text == "observation-density") return SweepKind::ObservationDensity;
  if (text == "method-comparison") return SweepKind::MethodComparison;
  throw std::invalid_argument("unknown sweep kind '" + text +
                              "' (seed-sensitivity, observation-density, method-comparison)");
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

SweepResult experiment_sweep(const SweepConfig& config, const std::vector<fvm::ScalarField2D>& truths,
                             const prior::LatentPrior& prior) {
  if (truths.empty()) throw std::invalid_argument("sweep: no ground-truth fields");
  if (config.layouts.empty() || config.methods.empty() || config.n_seeds == 0)
    throw std::invalid_argument("sweep: layouts, methods and seeds must be non-empty");

  SweepResult result;
  for (std::size_t s = 0; s < config.n_seeds; ++s)
    for (std::size_t m : config.layouts)
      for (PriorMode method : config.methods) {
        SweepRun r;
        r.seed = s;
        r.truth_index = config.kind == SweepKind::SeedSensitivity ? 0 : s % truths.size();
        r.layout = m;
        r.method = method;
        result.runs.push_back(r);
      }

  // Truth heads are shared by every run on the same truth.
  std::vector<fvm::ScalarField2D> heads(truths.size());
  for (std::size_t k = 0; k < truths.size(); ++k) {
    auto K = truths[k];
    for (double& v : K.values()) v += prior.codec.stats().floor;
    heads[k] = fvm::solve_head(fvm::assemble_system(K, config.inversion.bc));
  }

  const auto n = static_cast<std::ptrdiff_t>(result.runs.size());
  const int workers = static_cast<int>(std::max<std::size_t>(1, config.workers));
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    auto& r = result.runs[static_cast<std::size_t>(k)];
    try {
      const auto& truth = truths[r.truth_index];
      const auto& h_true = heads[r.truth_index];
      ObservationSet obs = observe_heads(h_true, r.layout);
      if (config.conductivity_layout) add_conductivity_observations(obs, truth, config.conductivity_layout);
      InversionConfig ic = config.inversion;
      ic.mode = r.method;
      ic.seed = derive_seed(config.inversion.seed, "sweep", r.seed);
      auto res = run_inversion(obs, ic, prior);
      attach_metrics(res, truth, h_true, config.log_domain);
      r.metrics = *res.metrics;
      r.initial_misfit = res.history.front().misfit;
      r.final_misfit = res.history[res.best_iter].misfit;
      r.iterations = res.iterations;
      r.ok = !res.aborted;
      if (res.aborted) r.error = res.abort_reason;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
  }

  const std::pair<const char*, double metrics::MetricsBundle::*> fields[] = {
      {"eps_K", &metrics::MetricsBundle::eps_K},
      {"eps_h", &metrics::MetricsBundle::eps_h},
      {"eps_K_tilde", &metrics::MetricsBundle::eps_K_tilde},
      {"ssim", &metrics::MetricsBundle::ssim}};
  for (std::size_t m : config.layouts)
    for (PriorMode method : config.methods)
      for (const auto& [name, member] : fields) {
        std::vector<double> vals;
        for (const auto& r : result.runs)
          if (r.ok && r.layout == m && r.method == method) vals.push_back(r.metrics.*member);
        SummaryRow row;
        row.layout = m;
        row.method = method;
        row.metric = name;
        row.count = vals.size();
        row.median = quantile(vals, 0.5);
        row.q1 = quantile(vals, 0.25);
        row.q3 = quantile(vals, 0.75);
        double sum = 0.0;
        for (double v : vals) sum += v;
        row.mean = vals.empty() ? NAN : sum / static_cast<double>(vals.size());
        result.summary.push_back(row);
      }
  return result;
}

void write_sweep(const fs::path& dir, const SweepResult& result, SweepKind kind) {
  using synth::format_double;
  fs::create_directories(dir);
  std::ofstream runs(dir / "runs.csv");
  if (!runs) throw std::runtime_error("cannot write " + (dir / "runs.csv").string());
  runs << "kind,seed,truth,layout,method,status,eps_K,eps_h,eps_K_tilde,ssim,initial_misfit,final_misfit,iterations,"
          "error\n";
  for (const auto& r : result.runs) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    runs << to_string(kind) << ',' << r.seed << ',' << r.truth_index << ',' << r.layout << ',' << to_string(r.method)
         << ',' << (r.ok ? "ok" : "failed") << ',' << format_double(r.metrics.eps_K) << ','
         << format_double(r.metrics.eps_h) << ',' << format_double(r.metrics.eps_K_tilde) << ','
         << format_double(r.metrics.ssim) << ',' << format_double(r.initial_misfit) << ','
         << format_double(r.final_misfit) << ',' << r.iterations << ',' << err << '\n';
  }
  std::ofstream sum(dir / "summary.csv");
  if (!sum) throw std::runtime_error("cannot write " + (dir / "summary.csv").string());
  sum << "layout,method,metric,count,median,q1,q3,mean\n";
  for (const auto& s : result.summary)
    sum << s.layout << ',' << to_string(s.method) << ',' << s.metric << ',' << s.count << ',' << format_double(s.median)
        << ',' << format_double(s.q1) << ',' << format_double(s.q3) << ',' << format_double(s.mean) << '\n';
}

}  // namespace lf::inversion
