#include "latentflow/metrics/ssim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace lf::metrics {

namespace {

inline std::size_t clamp_index(std::ptrdiff_t v, std::size_t n) {
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(v, 0, static_cast<std::ptrdiff_t>(n) - 1));
}

}  // namespace

double ssim(const fvm::ScalarField2D& p, const fvm::ScalarField2D& q, std::size_t window, double dynamic_range) {
  fvm::require_same_grid(p, q, "ssim");
  if (!(dynamic_range > 0.0)) throw std::invalid_argument("ssim: dynamic range must be positive");
  if (window == 0 || window > p.nx() || window > p.ny())
    throw std::invalid_argument("ssim: window " + std::to_string(window) + " does not fit a " +
                                std::to_string(p.nx()) + "x" + std::to_string(p.ny()) + " field");
  const double c1 = (kSsimK1 * dynamic_range) * (kSsimK1 * dynamic_range);
  const double c2 = (kSsimK2 * dynamic_range) * (kSsimK2 * dynamic_range);
  const std::size_t nx = p.nx(), ny = p.ny();
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  const auto lo = -half, hi = static_cast<std::ptrdiff_t>(window) - half;  // [lo, hi)
  const double inv = 1.0 / static_cast<double>(window * window);

  std::vector<double> row_sum(ny, 0.0);
  const auto rows = static_cast<std::ptrdiff_t>(ny);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t jj = 0; jj < rows; ++jj) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      double sp = 0.0, sq = 0.0, spp = 0.0, sqq = 0.0, spq = 0.0;
      for (auto dj = lo; dj < hi; ++dj) {
        const std::size_t y = clamp_index(jj + dj, ny);
        for (auto di = lo; di < hi; ++di) {
          const std::size_t x = clamp_index(static_cast<std::ptrdiff_t>(i) + di, nx);
          const double a = p(x, y), b = q(x, y);
          sp += a;
          sq += b;
          spp += a * a;
          sqq += b * b;
          spq += a * b;
        }
      }
      const double mp = sp * inv, mq = sq * inv;
      const double vp = spp * inv - mp * mp;
      const double vq = sqq * inv - mq * mq;
      const double cov = spq * inv - mp * mq;
      acc += ((2.0 * mp * mq + c1) * (2.0 * cov + c2)) / ((mp * mp + mq * mq + c1) * (vp + vq + c2));
    }
    row_sum[static_cast<std::size_t>(jj)] = acc;
  }
  double total = 0.0;
  for (double r : row_sum) total += r;
  return total / static_cast<double>(nx * ny);
}

fvm::ScalarField2D sobel_magnitude(const fvm::ScalarField2D& f) {
  if (f.nx() < 3 || f.ny() < 3) throw std::invalid_argument("sobel_edges: field must be at least 3x3");
  const std::size_t nx = f.nx(), ny = f.ny();
  auto out = f.with_values(std::vector<double>(f.size(), 0.0));
  auto at = [&](std::ptrdiff_t i, std::ptrdiff_t j) { return f(clamp_index(i, nx), clamp_index(j, ny)); };
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const auto x = static_cast<std::ptrdiff_t>(i), y = static_cast<std::ptrdiff_t>(j);
      const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
      const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
      out(i, j) = std::sqrt(gx * gx + gy * gy);
    }
  return out;
}

fvm::ScalarField2D sobel_edges(const fvm::ScalarField2D& f) {
  auto m = sobel_magnitude(f);
  const double lo = m.min(), hi = m.max();
  if (hi > lo)
    for (double& v : m.values()) v = (v - lo) / (hi - lo);
  else
    std::fill(m.values().begin(), m.values().end(), 0.0);
  return m;
}

}  // namespace lf::metrics
