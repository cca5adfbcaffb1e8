#include <doctest.h>

#include <cmath>

#include "latentflow/metrics/distribution.hpp"
#include "latentflow/metrics/embedding.hpp"
#include "latentflow/metrics/errors.hpp"
#include "latentflow/metrics/ssim.hpp"
#include "support.hpp"

using namespace lf;
using namespace lf::metrics;
using fvm::ScalarField2D;

namespace {

ScalarField2D random_field(std::size_t n, std::uint64_t seed) { return test::random_conductivity(n, n, seed, -1.0, 2.0); }

ScalarField2D step_edge(std::size_t n, std::size_t column) {
  auto f = fvm::GridSpec{n, n}.field();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = column; i < n; ++i) f(i, j) = 1.0;
  return f;
}

// Independent SSIM: two-pass moments per window, replicate padding done by explicit clamping.
double ssim_oracle(const ScalarField2D& p, const ScalarField2D& q, int w, double L) {
  const int nx = static_cast<int>(p.nx()), ny = static_cast<int>(p.ny()), h = w / 2;
  const double c1 = (0.01 * L) * (0.01 * L), c2 = (0.03 * L) * (0.03 * L);
  double total = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      std::vector<double> a, b;
      for (int dj = -h; dj < w - h; ++dj)
        for (int di = -h; di < w - h; ++di) {
          const auto x = static_cast<std::size_t>(std::min(std::max(i + di, 0), nx - 1));
          const auto y = static_cast<std::size_t>(std::min(std::max(j + dj, 0), ny - 1));
          a.push_back(p(x, y));
          b.push_back(q(x, y));
        }
      const double n = static_cast<double>(a.size());
      double ma = 0, mb = 0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        ma += a[k] / n;
        mb += b[k] / n;
      }
      double va = 0, vb = 0, cv = 0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        va += (a[k] - ma) * (a[k] - ma) / n;
        vb += (b[k] - mb) * (b[k] - mb) / n;
        cv += (a[k] - ma) * (b[k] - mb) / n;
      }
      total += (2 * ma * mb + c1) * (2 * cv + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
  return total / (nx * ny);
}

double kid_oracle(const std::vector<Embedding>& x, const std::vector<Embedding>& y) {
  const double m = static_cast<double>(x.size()), n = static_cast<double>(y.size());
  double kxx = 0, kyy = 0, kxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (i != j) kxx += kid_kernel(x[i], x[j]);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (i != j) kyy += kid_kernel(y[i], y[j]);
  for (const auto& a : x)
    for (const auto& b : y) kxy += kid_kernel(a, b);
  return kxx / (m * (m - 1)) + kyy / (n * (n - 1)) - 2 * kxy / (m * n);
}

std::vector<Embedding> gaussian_cloud(std::size_t n, std::size_t d, double mean, double sd, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Embedding> out(n, Embedding(d));
  for (auto& e : out)
    for (double& v : e) v = mean + sd * rng.normal();
  return out;
}

}  // namespace

TEST_CASE("relative L2 error") {
  const auto t = random_field(9, 1);
  CHECK(relative_l2(t, t) == 0.0);
  auto twice = t;
  for (double& v : twice.values()) v *= 2.0;
  CHECK(relative_l2(twice, t) == doctest::Approx(1.0).epsilon(1e-14));
  const auto p = random_field(9, 2);
  double num = 0, den = 0;
  for (std::size_t j = 0; j < 9; ++j)
    for (std::size_t i = 0; i < 9; ++i) {
      num += (p(i, j) - t(i, j)) * (p(i, j) - t(i, j));
      den += t(i, j) * t(i, j);
    }
  CHECK(relative_l2(p, t) == doctest::Approx(std::sqrt(num / den)).epsilon(1e-14));
  CHECK(relative_l2(p, t) >= 0.0);
  CHECK_THROWS(relative_l2(p, random_field(8, 1)));
}

TEST_CASE("mean-corrected error") {
  const auto t = random_field(9, 3);
  CHECK(mean_corrected_relative(t, t) == 0.0);
  CHECK(mean_corrected_relative(t.with_values(std::vector<double>(t.size(), t.mean())), t) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(mean_corrected_relative(t, fvm::GridSpec{9, 9}.field(2.0)));
}

TEST_CASE("metric bundle in the log domain") {
  const auto Kt = test::random_conductivity(12, 12, 4, 1e-3, 1.0);
  const auto Kp = test::random_conductivity(12, 12, 5, 1e-3, 1.0);
  const auto h = random_field(12, 6);
  const auto b = evaluate_fields(Kp, Kt, h, h, true);
  CHECK(b.evaluated_in_log);
  CHECK(b.eps_h == 0.0);
  CHECK(b.eps_K == relative_l2(log_field(Kp), log_field(Kt)));
  CHECK(b.eps_K_tilde == mean_corrected_relative(log_field(Kp), log_field(Kt)));
  CHECK(b.ssim >= -1.0);
  CHECK(b.ssim <= 1.0);
  const auto same = evaluate_fields(Kt, Kt, h, h, true);
  CHECK(same.eps_K == 0.0);
  CHECK(same.ssim == 1.0);
  CHECK_THROWS(evaluate_fields(fvm::GridSpec{12, 12}.field(-1.0), Kt, h, h, true));
}

TEST_CASE("SSIM") {
  const auto p = random_field(16, 7), q = random_field(16, 8);
  CHECK(ssim(p, p, 7, 3.0) == 1.0);
  CHECK(std::abs(ssim(p, q, 7, 3.0) - ssim_oracle(p, q, 7, 3.0)) < 1e-12);
  CHECK(std::abs(ssim(p, q, 4, 3.0) - ssim_oracle(p, q, 4, 3.0)) < 1e-12);
  CHECK(ssim(p, q, 7, 3.0) == doctest::Approx(ssim(q, p, 7, 3.0)).epsilon(1e-14));
  auto nudged = p;
  nudged(5, 5) += 1e-3;
  CHECK(ssim(p, nudged, 7, 3.0) < 1.0);

  // Constant pair: only the luminance term survives.
  const double c = 0.4, L = 2.0, c1 = (0.01 * L) * (0.01 * L);
  const auto a = fvm::GridSpec{10, 10}.field(c), b = fvm::GridSpec{10, 10}.field(c + L);
  const double expect = (2 * c * (c + L) + c1) / (c * c + (c + L) * (c + L) + c1);
  CHECK(ssim(a, b, 7, L) == doctest::Approx(expect).epsilon(1e-10));
  CHECK_THROWS(ssim(a, b, 11, L));
  CHECK_THROWS(ssim(a, b, 7, 0.0));
}

TEST_CASE("Sobel edges") {
  for (double v : sobel_magnitude(fvm::GridSpec{8, 8}.field(3.0)).values()) CHECK(v == 0.0);
  for (double v : sobel_edges(fvm::GridSpec{8, 8}.field(3.0)).values()) CHECK(v == 0.0);

  const auto e = sobel_magnitude(step_edge(10, 5));
  for (std::size_t j = 0; j < 10; ++j) {
    CHECK(e(4, j) == e.max());
    CHECK(e(5, j) == e.max());
    CHECK(e(2, j) == 0.0);
    CHECK(e(8, j) == 0.0);
  }

  auto spike = fvm::GridSpec{7, 7}.field();
  spike(3, 3) = 1.0;
  const auto s = sobel_magnitude(spike);
  const double hand[3][3] = {{std::sqrt(2.0), 2.0, std::sqrt(2.0)}, {2.0, 0.0, 2.0}, {std::sqrt(2.0), 2.0, std::sqrt(2.0)}};
  for (std::size_t j = 0; j < 7; ++j)
    for (std::size_t i = 0; i < 7; ++i) {
      const bool near = i >= 2 && i <= 4 && j >= 2 && j <= 4;
      CHECK(s(i, j) == doctest::Approx(near ? hand[j - 2][i - 2] : 0.0).epsilon(1e-15));
    }
  const auto n = sobel_edges(spike);
  CHECK(n.max() == 1.0);
  CHECK(n.min() == 0.0);
}

TEST_CASE("feature extractor") {
  FeatureExtractor fx(7);
  const auto f = random_field(32, 9);
  const auto a = fx(f);
  CHECK(a.size() == 64);
  CHECK(a == FeatureExtractor(7)(f));
  CHECK(a == embed(f, 7));
  CHECK_FALSE(a == FeatureExtractor(8)(f));
  CHECK_FALSE(fx(step_edge(32, 10)) == fx(step_edge(32, 20)));
  for (double v : a) CHECK(std::isfinite(v));
}

TEST_CASE("FID") {
  const auto x = gaussian_cloud(200, 4, 0.0, 1.0, 1);
  CHECK(std::abs(fid(x, x)) < 1e-8);
  const auto y = gaussian_cloud(200, 4, 0.3, 1.5, 2);
  CHECK(fid(x, y) == doctest::Approx(fid(y, x)).epsilon(1e-8));

  const auto a = gaussian_cloud(10000, 1, 0.0, 1.0, 3), b = gaussian_cloud(10000, 1, 1.0, 1.0, 4);
  CHECK(std::abs(fid(a, b) - 1.0) < 0.06);

  const auto good = gaussian_cloud(200, 4, 0.1, 1.0, 5), bad = gaussian_cloud(200, 4, 1.0, 2.0, 6);
  CHECK(fid(x, good) < fid(x, bad));
  CHECK_THROWS(fid(gaussian_cloud(3, 4, 0, 1, 1), x));
  CHECK(std::isfinite(fid(gaussian_cloud(3, 4, 0, 1, 1), x, FidOptions{0.1})));
}

TEST_CASE("KID") {
  const auto x = gaussian_cloud(200, 64, 0.0, 1.0, 1), y = gaussian_cloud(150, 64, 0.2, 1.0, 2);
  CHECK(kid(x, y) == doctest::Approx(kid_oracle(x, y)).epsilon(1e-12));
  CHECK(kid(x, y) == serial::kid(x, y));
  CHECK(kid(x, y) == doctest::Approx(kid(y, x)).epsilon(1e-12));
  const auto small = gaussian_cloud(20, 8, 0.0, 1.0, 3);
  CHECK(kid(small, small) == doctest::Approx(kid_oracle(small, small)).epsilon(1e-12));
  CHECK(kid(small, small) <= 0.0);

  // Unbiased: the mean over resamples of two same-distribution sets sits near zero.
  std::vector<double> v;
  for (std::uint64_t r = 0; r < 100; ++r)
    v.push_back(kid(gaussian_cloud(30, 8, 0, 1, 100 + r), gaussian_cloud(30, 8, 0, 1, 500 + r)));
  double mean = 0, var = 0;
  for (double e : v) mean += e / 100.0;
  for (double e : v) var += (e - mean) * (e - mean) / 99.0;
  CHECK(std::abs(mean) < 3.0 * std::sqrt(var / 100.0));
  CHECK(kid(x, gaussian_cloud(200, 64, 0.0, 1.0, 7)) < kid(x, gaussian_cloud(200, 64, 1.0, 1.0, 8)));
}
