#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "latentflow/synth/bimaterial.hpp"
#include "latentflow/synth/dataset.hpp"
#include "latentflow/synth/gaussian.hpp"
#include "support.hpp"

using namespace lf;
using namespace lf::synth;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("lf_synth_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::size_t count_files(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.is_regular_file();
  return n;
}

}  // namespace

TEST_CASE("Gaussian fields are normalized to [0, 1]") {
  for (double lambda : default_correlation_lengths()) {
    const auto K = gaussian_field({lambda, fvm::GridSpec{32, 32}, 17});
    CHECK(K.min() == 0.0);
    CHECK(K.max() == 1.0);
  }
}

TEST_CASE("pre-clip log field is standardized") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto Y = gaussian_log_field({0.3, fvm::GridSpec{40, 24}, seed});
    double m = 0.0, v = 0.0;
    for (double y : Y.values()) m += y;
    m /= static_cast<double>(Y.size());
    for (double y : Y.values()) v += (y - m) * (y - m);
    v /= static_cast<double>(Y.size());
    CHECK(std::abs(m) < 1e-12);
    CHECK(std::abs(v - 1.0) < 1e-12);
  }
}

TEST_CASE("total variation decreases with correlation length") {
  double previous = INFINITY;
  for (double lambda : {0.1, 0.2, 0.3, 0.4}) {
    double tv = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) tv += total_variation(gaussian_field({lambda, fvm::GridSpec{32, 32}, seed}));
    tv /= 50.0;
    CAPTURE(lambda);
    CHECK(tv < previous);
    previous = tv;
  }
}

TEST_CASE("Matern process reproduces its covariance") {
  const fvm::GridSpec g{64, 64, 0.0, 64.0, 0.0, 64.0};
  const double ell = 8.0;
  const std::size_t lag = 8;
  double var = 0.0, cov = 0.0;
  std::size_t nv = 0, nc = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto f = matern_gaussian_process(ell, 1.0, g, seed);
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) {
        var += f(i, j) * f(i, j);
        ++nv;
        if (i + lag < g.nx) {
          cov += f(i, j) * f(i + lag, j);
          ++nc;
        }
      }
  }
  var /= static_cast<double>(nv);
  cov /= static_cast<double>(nc);
  CHECK(std::abs(var - 1.0) < 0.1);
  CHECK(std::abs(cov / var - matern_covariance(ell, ell)) < 0.1);
}

TEST_CASE("Matern covariance closed form") {
  CHECK(matern_covariance(0.0, 5.0) == 1.0);
  // nu = 1: (sqrt2 r/l) K1(sqrt2 r/l)
  const double s = std::sqrt(2.0);
  CHECK(matern_covariance(5.0, 5.0, 1.0, 2.0) == doctest::Approx(2.0 * s * std::cyl_bessel_k(1.0, s)).epsilon(1e-14));
  CHECK_THROWS(matern_covariance(1.0, 1.0, 2.5));
  CHECK_THROWS(matern_gaussian_process(5.0, 0.5, fvm::GridSpec{8, 8}, 1));
}

TEST_CASE("synthesis is a pure function of the seed") {
  const fvm::GridSpec g{32, 32};
  CHECK(matern_gaussian_process(10, 1, g, 3) == matern_gaussian_process(10, 1, g, 3));
  CHECK_FALSE(matern_gaussian_process(10, 1, g, 3) == matern_gaussian_process(10, 1, g, 4));
  CHECK(gaussian_field({0.2, g, 9}) == gaussian_field({0.2, g, 9}));
  BimaterialParams bp;
  bp.seed = 5;
  CHECK(bimaterial_field(bp) == bimaterial_field(bp));
}

TEST_CASE("bimaterial phase fractions") {
  CHECK(threshold_alpha(0.0) == 0.25);
  CHECK(threshold_alpha(1.0) == 0.75);
  BimaterialParams bp;
  bp.threshold_p = 0.5;
  bp.seed = 2;
  const auto s = bimaterial_sample(bp);
  CHECK(s.alpha == 0.5);
  const auto n_high = static_cast<double>(std::count(s.high_phase.begin(), s.high_phase.end(), true));
  CHECK(std::abs(n_high - 0.5 * 1024) <= 1.0);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    BimaterialParams p;
    p.seed = seed;
    const auto r = bimaterial_sample(p);
    CHECK(r.alpha >= 0.25);
    CHECK(r.alpha <= 0.75);
    const auto high = static_cast<double>(std::count(r.high_phase.begin(), r.high_phase.end(), true)) / 1024.0;
    CHECK(high >= 0.25 - 1.0 / 1024);
    CHECK(high <= 0.75 + 1.0 / 1024);
    CHECK(std::abs(high - (1.0 - r.alpha)) <= 1.0 / 1024);
    CHECK(r.K.all_positive());
  }
}

TEST_CASE("bimaterial ln K histogram has modes at the phase means") {
  // 0.5-wide bins over [-25, -5)
  std::vector<std::size_t> hist(40);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    BimaterialParams p;
    p.seed = seed;
    for (double k : bimaterial_field(p).values()) {
      const double l = std::log(k);
      if (l >= -25 && l < -5) ++hist[static_cast<std::size_t>((l + 25) / 0.5)];
    }
  }
  auto peak_in = [&](double lo, double hi) {
    std::size_t best = 0;
    for (std::size_t b = 0; b < hist.size(); ++b) {
      const double c = -25 + 0.5 * (static_cast<double>(b) + 0.5);
      if (c >= lo && c < hi && hist[b] > hist[best]) best = b;
    }
    return best;
  };
  const auto hi = peak_in(-15, -5), lo = peak_in(-25, -15);
  const double hi_c = -25 + 0.5 * (static_cast<double>(hi) + 0.5), lo_c = -25 + 0.5 * (static_cast<double>(lo) + 0.5);
  CHECK(std::abs(hi_c - std::log(1e-5)) <= 1.0);
  CHECK(std::abs(lo_c - std::log(1e-8)) <= 1.0);
  const auto valley = *std::min_element(hist.begin() + static_cast<long>(lo), hist.begin() + static_cast<long>(hi));
  CHECK(valley < hist[hi] / 4);
  CHECK(valley < hist[lo] / 4);
}

TEST_CASE("dataset with the full split counts") {
  const auto dir = scratch("full");
  DatasetConfig c;
  c.master_seed = 42;
  const auto m = build_dataset(c, dir);
  CHECK(count_files(dir / "train") == 1400);
  CHECK(count_files(dir / "val") == 400);
  CHECK(count_files(dir / "test") == 200);
  std::set<std::uint64_t> seeds;
  for (const auto& e : m.entries) seeds.insert(e.seed);
  CHECK(seeds.size() == 2000);
  CHECK(m.stats.floor == 0.01);
  CHECK(m.stats.log_min == doctest::Approx(std::log(0.01)));
  fs::remove_all(dir);
}

TEST_CASE("dataset regeneration is bitwise identical and the manifest round-trips") {
  const auto a = scratch("a"), b = scratch("b");
  DatasetConfig c;
  c.kind = FieldKind::Bimaterial;
  c.n_total = 30;
  c.splits = {20, 6, 4};
  c.master_seed = 7;
  const auto ma = build_dataset(c, a);
  build_dataset(c, b);
  CHECK(slurp(a / "manifest.txt") == slurp(b / "manifest.txt"));
  for (const auto& e : ma.entries) CHECK(slurp(a / e.filename) == slurp(b / e.filename));

  const auto back = load_manifest(a);
  std::ostringstream x, y;
  write_manifest(x, ma);
  write_manifest(y, back);
  CHECK(x.str() == y.str());
  CHECK(back.split("test").size() == 4);
  CHECK(load_split(a, back, "val").size() == 6);
  CHECK(ma.stats.floor == 0.0);

  c.splits = {20, 6, 5};
  CHECK_THROWS(build_dataset(c, b));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("field kind names") {
  CHECK(parse_field_kind("gaussian") == FieldKind::Gaussian);
  CHECK(parse_field_kind(to_string(FieldKind::Bimaterial)) == FieldKind::Bimaterial);
  CHECK_THROWS(parse_field_kind("checkerboard"));
}
