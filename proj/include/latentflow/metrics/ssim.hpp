#pragma once

#include <cstddef>

#include "latentflow/fvm/field.hpp"

namespace lf::metrics {

inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// Mean over every cell of the local SSIM index computed in a window x window neighbourhood
/// (replicate padding, population moments), with C1 = (k1 L)^2 and C2 = (k2 L)^2.
double ssim(const fvm::ScalarField2D& p, const fvm::ScalarField2D& q, std::size_t window, double dynamic_range);

/// 3x3 Sobel gradient magnitude with replicate-padded borders, not normalized.
fvm::ScalarField2D sobel_magnitude(const fvm::ScalarField2D& field);

/// Sobel magnitude min-max normalized to [0, 1]; a constant field maps to zeros.
fvm::ScalarField2D sobel_edges(const fvm::ScalarField2D& field);

}  // namespace lf::metrics
