#include "latentflow/synth/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "latentflow/common/rng.hpp"
#include "latentflow/fvm/field_io.hpp"
#include "latentflow/synth/gaussian.hpp"

namespace lf::synth {

namespace fs = std::filesystem;

std::string to_string(FieldKind kind) { return kind == FieldKind::Gaussian ? "gaussian" : "bimaterial"; }

FieldKind parse_field_kind(std::string_view text) {
  if (text == "gaussian") return FieldKind::Gaussian;
  if (text == "bimaterial") return FieldKind::Bimaterial;
  throw std::invalid_argument("unknown field kind '" + std::string(text) + "' (expected gaussian or bimaterial)");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::invalid_argument("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  return v;
}

std::vector<const ManifestEntry*> DatasetManifest::split(std::string_view name) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries)
    if (e.split == name) out.push_back(&e);
  return out;
}

double log_floor(const DatasetConfig& config) {
  return config.kind == FieldKind::Gaussian ? config.k_floor : 0.0;
}

std::uint64_t sample_seed(std::uint64_t master, std::size_t index) { return derive_seed(master, "generate", index); }

fvm::ScalarField2D generate_sample(const DatasetConfig& config, std::size_t index, std::uint64_t seed,
                                   std::vector<std::pair<std::string, std::string>>* params) {
  if (config.kind == FieldKind::Gaussian) {
    if (config.correlation_lengths.empty()) throw std::invalid_argument("generate: no correlation lengths configured");
    const double lambda = config.correlation_lengths[index % config.correlation_lengths.size()];
    if (params) params->emplace_back("lambda", format_double(lambda));
    return gaussian_field(GrfParams{lambda, config.grid, seed});
  }
  BimaterialParams bp = config.bimaterial;
  bp.grid = config.grid;
  bp.seed = seed;
  auto s = bimaterial_sample(bp);
  if (params) params->emplace_back("alpha", format_double(s.alpha));
  return std::move(s.K);
}

DatasetManifest build_dataset(const DatasetConfig& config, const fs::path& out_dir) {
  if (config.splits.total() != config.n_total)
    throw std::invalid_argument("build_dataset: splits " + std::to_string(config.splits.train) + "+" +
                                std::to_string(config.splits.val) + "+" + std::to_string(config.splits.test) +
                                " do not sum to n_total " + std::to_string(config.n_total));
  if (config.kind == FieldKind::Gaussian && !(config.k_floor > 0.0))
    throw std::invalid_argument("build_dataset: k_floor must be positive for Gaussian fields");

  const std::size_t n = config.n_total;
  DatasetManifest manifest;
  manifest.kind = config.kind;
  manifest.nx = config.grid.nx;
  manifest.ny = config.grid.ny;
  manifest.entries.resize(n);

  std::set<std::uint64_t> seen;
  for (std::size_t k = 0; k < n; ++k) {
    auto& e = manifest.entries[k];
    e.split = k < config.splits.train ? "train" : k < config.splits.train + config.splits.val ? "val" : "test";
    char name[64];
    std::snprintf(name, sizeof name, "%s/sample_%05zu.ldf2", e.split.c_str(), k);
    e.filename = name;
    e.seed = sample_seed(config.master_seed, k);
    if (!seen.insert(e.seed).second) throw std::runtime_error("build_dataset: seed collision at sample " + std::to_string(k));
  }

  for (const char* split : {"train", "val", "test"}) {
    std::error_code ec;
    fs::create_directories(out_dir / split, ec);
    if (ec) throw std::runtime_error("cannot create " + (out_dir / split).string() + ": " + ec.message());
  }

  const double floor = log_floor(config);
  std::vector<double> lo(n, INFINITY), hi(n, -INFINITY);
  std::vector<std::string> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t kk = 0; kk < count; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    auto& e = manifest.entries[k];
    try {
      const auto field = generate_sample(config, k, e.seed, &e.params);
      fvm::save_field(out_dir / e.filename, field);
      for (double v : field.values()) {
        const double l = std::log(v + floor);
        lo[k] = std::min(lo[k], l);
        hi[k] = std::max(hi[k], l);
      }
    } catch (const std::exception& ex) {
      errors[k] = ex.what();
    }
  }
  for (const auto& err : errors)
    if (!err.empty()) throw std::runtime_error("build_dataset: " + err);

  manifest.stats.floor = floor;
  manifest.stats.log_min = INFINITY;
  manifest.stats.log_max = -INFINITY;
  for (std::size_t k = 0; k < config.splits.train; ++k) {
    manifest.stats.log_min = std::min(manifest.stats.log_min, lo[k]);
    manifest.stats.log_max = std::max(manifest.stats.log_max, hi[k]);
  }
  if (config.splits.train == 0) throw std::invalid_argument("build_dataset: training split is empty");

  std::ofstream os(out_dir / "manifest.txt");
  if (!os) throw std::runtime_error("cannot write " + (out_dir / "manifest.txt").string());
  write_manifest(os, manifest);
  return manifest;
}

void write_manifest(std::ostream& os, const DatasetManifest& m) {
  os << "# latentflow dataset manifest\n";
  os << "# kind=" << to_string(m.kind) << " nx=" << m.nx << " ny=" << m.ny << " floor=" << format_double(m.stats.floor)
     << " log_min=" << format_double(m.stats.log_min) << " log_max=" << format_double(m.stats.log_max) << "\n";
  for (const auto& e : m.entries) {
    os << e.split << ' ' << e.filename << ' ' << e.seed;
    for (const auto& [k, v] : e.params) os << ' ' << k << '=' << v;
    os << '\n';
  }
}

namespace {

std::pair<std::string, std::string> split_kv(const std::string& token, const std::string& origin) {
  const auto eq = token.find('=');
  if (eq == std::string::npos || eq == 0) throw std::runtime_error(origin + ": malformed key=value token '" + token + "'");
  return {token.substr(0, eq), token.substr(eq + 1)};
}

}  // namespace

DatasetManifest read_manifest(std::istream& is, const std::string& origin) {
  DatasetManifest m;
  bool have_header = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string tok;
      ls >> tok;
      while (ls >> tok) {
        if (tok.find('=') == std::string::npos) break;
        const auto [k, v] = split_kv(tok, origin);
        if (k == "kind") m.kind = parse_field_kind(v), have_header = true;
        else if (k == "nx") m.nx = std::stoul(v);
        else if (k == "ny") m.ny = std::stoul(v);
        else if (k == "floor") m.stats.floor = parse_double(v, "floor");
        else if (k == "log_min") m.stats.log_min = parse_double(v, "log_min");
        else if (k == "log_max") m.stats.log_max = parse_double(v, "log_max");
      }
      continue;
    }
    ManifestEntry e;
    if (!(ls >> e.split >> e.filename >> e.seed))
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": malformed manifest record");
    std::string tok;
    while (ls >> tok) e.params.push_back(split_kv(tok, origin));
    m.entries.push_back(std::move(e));
  }
  if (!have_header) throw std::runtime_error(origin + ": manifest header with kind= is missing");
  return m;
}

DatasetManifest load_manifest(const fs::path& dataset_dir) {
  const auto path = dataset_dir / "manifest.txt";
  std::ifstream is(path);
  if (!is) throw std::runtime_error("dataset manifest not found: " + path.string());
  return read_manifest(is, path.string());
}

std::vector<fvm::ScalarField2D> load_split(const fs::path& dataset_dir, const DatasetManifest& manifest,
                                           std::string_view split) {
  std::vector<fvm::ScalarField2D> out;
  for (const auto* e : manifest.split(split)) out.push_back(fvm::load_field(dataset_dir / e->filename));
  return out;
}

}  // namespace lf::synth
