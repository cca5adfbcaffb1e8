#include "latentflow/inversion/invert.hpp"

#include <cmath>
#include <fstream>

#include "latentflow/ad/optim.hpp"
#include "latentflow/fvm/field_io.hpp"
#include "latentflow/fvm/solver.hpp"
#include "latentflow/synth/dataset.hpp"

namespace lf::inversion {

namespace fs = std::filesystem;
using ad::Tensor;

namespace {
double norm(const Tensor& t) {
  double s = 0.0;
  for (double v : t.values()) s += v * v;
  return std::sqrt(s);
}
}  // namespace

InversionResult optimize(Objective& objective, const InversionConfig& config) {
  config.validate();
  InversionResult res;
  ad::ParameterSet x;
  x.add("x", objective.initial_point());
  std::optional<ad::Adam> adam;
  if (config.adam && config.eta > 0.0) adam.emplace(ad::AdamConfig{config.eta});
  double best = INFINITY;

  for (std::size_t it = 0; it < config.max_iter; ++it) {
    const Tensor current = x.at("x");
    Evaluation e;
    Tensor g;
    try {
      e = objective.evaluate(current);
      g = objective.gradient(current);
    } catch (const fvm::SolverError& err) {
      res.aborted = true;
      res.abort_reason = err.what();
      break;
    }
    const double gn = norm(g);
    res.history.push_back({it, e.misfit, e.regularizer + e.k_misfit, e.total, gn});
    res.iterations = it + 1;
    if (!std::isfinite(e.total) || !g.all_finite()) {
      res.aborted = true;
      res.abort_reason = "non-finite loss or gradient at iteration " + std::to_string(it);
      break;
    }
    if (e.total < best) {
      best = e.total;
      res.best_iter = it;
      res.x = current;
      res.K_fvm = e.K_fvm;
      res.h = e.h;
    }
    if (it >= config.patience) {
      const double prev = res.history[it - config.patience].total;
      if (std::abs(e.total - prev) <= config.rel_tol * std::max(std::abs(prev), 1e-300)) {
        res.early_stopped = true;
        break;
      }
    }
    if (it + 1 == config.max_iter || config.eta == 0.0) continue;
    ad::GradMap grads{{"x", std::move(g)}};
    if (adam) adam->step(x, grads);
    else ad::sgd_step(x, grads, config.eta);
  }
  if (res.K_fvm.size() == 0) throw std::runtime_error("inversion aborted before the first valid iterate: " + res.abort_reason);
  res.K = objective.reported(res.K_fvm);
  return res;
}

InversionResult invert(const ObservationSet& obs, const InversionConfig& config, const prior::LatentPrior& prior) {
  if (obs.empty()) throw std::invalid_argument("invert: no observations");
  LatentObjective objective(prior, obs, config);
  return optimize(objective, config);
}

InversionResult vae_prior_invert(const ObservationSet& obs, InversionConfig config, const prior::LatentPrior& prior) {
  config.mode = PriorMode::VaeOnly;
  return invert(obs, config, prior);
}

InversionResult pixel_space_invert(const ObservationSet& obs, const InversionConfig& config,
                                   const prior::FieldCodec& codec) {
  if (obs.empty()) throw std::invalid_argument("pixel_space_invert: no observations");
  PixelObjective objective(codec, obs, config);
  return optimize(objective, config);
}

InversionResult run_inversion(const ObservationSet& obs, const InversionConfig& config, const prior::LatentPrior& prior) {
  if (config.mode == PriorMode::PixelSpace) return pixel_space_invert(obs, config, prior.codec);
  return invert(obs, config, prior);
}

void attach_metrics(InversionResult& result, const fvm::ScalarField2D& K_true, const fvm::ScalarField2D& h_true,
                    bool log_domain) {
  result.metrics = metrics::evaluate_fields(result.K, K_true, result.h, h_true, log_domain);
}

void write_result_bundle(const fs::path& dir, const InversionResult& result) {
  fs::create_directories(dir);
  fvm::save_field(dir / "k_hat.ldf2", result.K);
  fvm::save_field(dir / "h_hat.ldf2", result.h);
  {
    std::ofstream os(dir / "loss.csv");
    if (!os) throw std::runtime_error("cannot write " + (dir / "loss.csv").string());
    os << "iter,misfit,regularizer,total,grad_norm\n";
    for (const auto& r : result.history)
      os << r.iter << ',' << synth::format_double(r.misfit) << ',' << synth::format_double(r.regularizer) << ','
         << synth::format_double(r.total) << ',' << synth::format_double(r.grad_norm) << '\n';
  }
  std::ofstream os(dir / "metrics.csv");
  if (!os) throw std::runtime_error("cannot write " + (dir / "metrics.csv").string());
  os << "run,metric,value\n";
  auto row = [&](const char* name, double v) { os << "inversion," << name << ',' << synth::format_double(v) << '\n'; };
  row("iterations", static_cast<double>(result.iterations));
  row("best_iter", static_cast<double>(result.best_iter));
  row("final_misfit", result.history.empty() ? NAN : result.history[result.best_iter].misfit);
  row("aborted", result.aborted ? 1.0 : 0.0);
  if (result.metrics) {
    row("eps_K", result.metrics->eps_K);
    row("eps_h", result.metrics->eps_h);
    row("eps_K_tilde", result.metrics->eps_K_tilde);
    row("ssim", result.metrics->ssim);
    row("evaluated_in_log", result.metrics->evaluated_in_log ? 1.0 : 0.0);
  }
}

}  // namespace lf::inversion
