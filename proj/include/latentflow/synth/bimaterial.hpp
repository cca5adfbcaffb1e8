#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "latentflow/fvm/field.hpp"

namespace lf::synth {

struct BimaterialParams {
  double high_log_mean = std::log(1e-5);
  double low_log_mean = std::log(1e-8);
  double matern_nu = 1.0;
  double matern_length = 50.0;  // metres, for both phase fields
  double split_length = 200.0;  // metres
  double matern_sigma = 1.0;    // standard deviation of each phase's ln K fluctuation
  /// Threshold draw in [0, 1]; NaN means draw it from the seed.
  double threshold_p = std::numeric_limits<double>::quiet_NaN();
  fvm::GridSpec grid{32, 32};
  std::uint64_t seed = 0;
};

struct BimaterialSample {
  fvm::ScalarField2D K;
  double alpha = 0.5;
  std::vector<bool> high_phase;  // true where K came from the high-conductivity phase
};

/// alpha = 0.25 + 0.5 p.
inline double threshold_alpha(double p) { return 0.25 + 0.5 * p; }

/// Two log-normal phases selected by a smooth splitting field: the round((1-alpha) N) cells with the
/// largest splitting value take the high phase, so the area fraction is exact per sample.
BimaterialSample bimaterial_sample(const BimaterialParams& params);
fvm::ScalarField2D bimaterial_field(const BimaterialParams& params);

}  // namespace lf::synth
