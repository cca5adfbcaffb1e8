#pragma once

#include <vector>

#include "latentflow/metrics/embedding.hpp"

namespace lf::metrics {

struct FidOptions {
  /// Covariances become (1 - s) Sigma + s tr(Sigma)/d I. Zero requires n >= d + 1 per set.
  double shrinkage = 0.0;
};

/// ||mu - mu'||^2 + tr(S + S' - 2 (S^1/2 S' S^1/2)^1/2), covariances with n - 1 normalization.
double fid(const std::vector<Embedding>& real, const std::vector<Embedding>& gen, const FidOptions& options = {});

/// Polynomial kernel ((1/d) u.v + 1)^3.
double kid_kernel(const Embedding& u, const Embedding& v);

/// Unbiased squared MMD with kid_kernel; rows reduced in parallel, then summed in row order.
double kid(const std::vector<Embedding>& real, const std::vector<Embedding>& gen);

namespace serial {
double kid(const std::vector<Embedding>& real, const std::vector<Embedding>& gen);
}  // namespace serial

}  // namespace lf::metrics
