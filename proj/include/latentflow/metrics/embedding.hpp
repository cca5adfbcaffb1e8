#pragma once

#include <cstdint>
#include <vector>

#include "latentflow/fvm/field.hpp"

namespace lf::metrics {

using Embedding = std::vector<double>;

/// Fixed random-weight feature map over Sobel edge maps: three 3x3 stride-2 conv layers
/// (1 -> 8 -> 16 -> 16 channels, tanh), then average pooling to 2x2, giving 64 features.
/// Stands in for a pretrained image network when computing FID and KID.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(std::uint64_t seed);

  Embedding operator()(const fvm::ScalarField2D& field) const;
  std::vector<Embedding> operator()(const std::vector<fvm::ScalarField2D>& fields) const;

  static constexpr std::size_t dim() { return 64; }
  std::uint64_t seed() const { return seed_; }

 private:
  struct Layer {
    std::size_t in, out;
    std::vector<double> w, b;
  };
  std::uint64_t seed_;
  std::vector<Layer> layers_;
};

Embedding embed(const fvm::ScalarField2D& field, std::uint64_t extractor_seed);

}  // namespace lf::metrics
