#include "latentflow/metrics/embedding.hpp"

#include <cmath>
#include <stdexcept>

#include "latentflow/ad/kernels.hpp"
#include "latentflow/common/rng.hpp"
#include "latentflow/metrics/ssim.hpp"

namespace lf::metrics {

FeatureExtractor::FeatureExtractor(std::uint64_t seed) : seed_(seed) {
  const std::size_t channels[] = {1, 8, 16, 16};
  for (std::size_t l = 0; l < 3; ++l) {
    Layer layer{channels[l], channels[l + 1], {}, {}};
    Rng rng(seed, "embedding", l);
    const double sd = std::sqrt(2.0 / static_cast<double>(9 * layer.in));
    layer.w.resize(layer.out * layer.in * 9);
    for (double& v : layer.w) v = sd * rng.normal();
    layer.b.resize(layer.out);
    for (double& v : layer.b) v = 0.1 * rng.normal();
    layers_.push_back(std::move(layer));
  }
}

Embedding FeatureExtractor::operator()(const fvm::ScalarField2D& field) const {
  const auto edges = sobel_edges(field);
  std::vector<double> x(edges.values().begin(), edges.values().end());
  std::size_t h = field.ny(), w = field.nx();
  for (const auto& layer : layers_) {
    const auto g = ad::kernels::make_conv_geom(1, layer.in, h, w, layer.out, 3, 3, 2, 1);
    std::vector<double> y(g.output_size());
    ad::kernels::serial::conv2d_forward(g, x.data(), layer.w.data(), layer.b.data(), y.data());
    for (double& v : y) v = std::tanh(v);
    x = std::move(y);
    h = g.out_h;
    w = g.out_w;
  }
  // Average-pool each channel into a 2x2 grid of quadrants. Odd sizes share the middle row/column,
  // so a 1x1 map (tiny grids) still yields well-defined features.
  const std::size_t c = layers_.back().out;
  Embedding out(c * 4, 0.0);
  const std::size_t y0[2] = {0, h / 2}, y1[2] = {(h + 1) / 2, h};
  const std::size_t x0[2] = {0, w / 2}, x1[2] = {(w + 1) / 2, w};
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t qy = 0; qy < 2; ++qy)
      for (std::size_t qx = 0; qx < 2; ++qx) {
        double s = 0.0;
        for (std::size_t y = y0[qy]; y < y1[qy]; ++y)
          for (std::size_t xx = x0[qx]; xx < x1[qx]; ++xx) s += x[(ch * h + y) * w + xx];
        out[ch * 4 + qy * 2 + qx] = s / static_cast<double>((y1[qy] - y0[qy]) * (x1[qx] - x0[qx]));
      }
  return out;
}

std::vector<Embedding> FeatureExtractor::operator()(const std::vector<fvm::ScalarField2D>& fields) const {
  std::vector<Embedding> out(fields.size());
  const auto n = static_cast<std::ptrdiff_t>(fields.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = (*this)(fields[static_cast<std::size_t>(k)]);
  return out;
}

Embedding embed(const fvm::ScalarField2D& field, std::uint64_t extractor_seed) {
  return FeatureExtractor(extractor_seed)(field);
}

}  // namespace lf::metrics
