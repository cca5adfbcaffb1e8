#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "latentflow/fvm/field.hpp"
#include "latentflow/synth/bimaterial.hpp"

namespace lf::synth {

enum class FieldKind { Gaussian, Bimaterial };
std::string to_string(FieldKind kind);
FieldKind parse_field_kind(std::string_view text);

struct SplitCounts {
  std::size_t train = 1400, val = 400, test = 200;
  std::size_t total() const { return train + val + test; }
};

struct DatasetConfig {
  FieldKind kind = FieldKind::Gaussian;
  fvm::GridSpec grid{32, 32};
  std::size_t n_total = 2000;
  SplitCounts splits{};
  std::uint64_t master_seed = 0;
  std::vector<double> correlation_lengths{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  BimaterialParams bimaterial{};
  /// Added to K before taking logs for network IO; Gaussian fields reach K = 0 exactly.
  double k_floor = 0.01;
};

/// Statistics of ln(K + floor) over the training split.
struct LogStats {
  double floor = 0.0;
  double log_min = 0.0;
  double log_max = 1.0;
};

struct ManifestEntry {
  std::string split;
  std::string filename;  // relative to the dataset directory
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> params;
};

struct DatasetManifest {
  FieldKind kind = FieldKind::Gaussian;
  std::size_t nx = 0, ny = 0;
  LogStats stats{};
  std::vector<ManifestEntry> entries;

  std::vector<const ManifestEntry*> split(std::string_view name) const;
};

/// Floor applied to a dataset kind (k_floor for Gaussian, 0 for bimaterial).
double log_floor(const DatasetConfig& config);

/// Seed of sample k: derive_seed(master, "generate", k).
std::uint64_t sample_seed(std::uint64_t master, std::size_t index);

/// The field for sample `index`, with its manifest parameters appended to `params` when non-null.
fvm::ScalarField2D generate_sample(const DatasetConfig& config, std::size_t index, std::uint64_t seed,
                                   std::vector<std::pair<std::string, std::string>>* params = nullptr);

/// Writes train/, val/ and test/ directories of LDF2 files plus manifest.txt.
DatasetManifest build_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir);

void write_manifest(std::ostream& os, const DatasetManifest& manifest);
DatasetManifest read_manifest(std::istream& is, const std::string& origin = "<stream>");
DatasetManifest load_manifest(const std::filesystem::path& dataset_dir);

std::vector<fvm::ScalarField2D> load_split(const std::filesystem::path& dataset_dir, const DatasetManifest& manifest,
                                           std::string_view split);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);
double parse_double(std::string_view text, std::string_view what);

}  // namespace lf::synth
