#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "latentflow/inversion/invert.hpp"

namespace lf::inversion {

enum class SweepKind { SeedSensitivity, ObservationDensity, MethodComparison };
std::string to_string(SweepKind kind);
SweepKind parse_sweep_kind(const std::string& text);

struct SweepConfig {
  SweepKind kind = SweepKind::ObservationDensity;
  std::vector<std::size_t> layouts{3, 5, 12, 16};  // m for m x m head observations
  std::size_t n_seeds = 5;
  std::vector<PriorMode> methods{PriorMode::LatentDiffusion};
  InversionConfig inversion{};
  bool log_domain = false;  // metrics in ln K
  std::size_t workers = 1;
  std::size_t conductivity_layout = 0;  // m for m x m K observations, 0 = none
};

struct SweepRun {
  std::size_t seed = 0;
  std::size_t truth_index = 0;
  std::size_t layout = 0;
  PriorMode method = PriorMode::LatentDiffusion;
  bool ok = false;
  std::string error;
  metrics::MetricsBundle metrics{};
  double initial_misfit = 0.0;
  double final_misfit = 0.0;
  std::size_t iterations = 0;
};

struct SummaryRow {
  std::size_t layout = 0;
  PriorMode method = PriorMode::LatentDiffusion;
  std::string metric;
  std::size_t count = 0;
  double median = 0.0, q1 = 0.0, q3 = 0.0, mean = 0.0;
};

struct SweepResult {
  std::vector<SweepRun> runs;
  std::vector<SummaryRow> summary;
};

/// Linear-interpolation quantile of unsorted values, q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Runs seeds x layouts x methods. Seed sensitivity keeps truths[0] and varies the latent
/// initialization; the other kinds pair seed s with truths[s mod n]. Failed runs are recorded
/// and the sweep continues.
SweepResult experiment_sweep(const SweepConfig& config, const std::vector<fvm::ScalarField2D>& truths,
                             const prior::LatentPrior& prior);

/// runs.csv (one row per run) and summary.csv (median, quartiles and mean per layout/method/metric).
void write_sweep(const std::filesystem::path& dir, const SweepResult& result, SweepKind kind);

}  // namespace lf::inversion
