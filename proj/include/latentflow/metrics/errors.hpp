#pragma once

#include "latentflow/fvm/field.hpp"

namespace lf::metrics {

/// ||pred - truth||_2 / ||truth||_2.
double relative_l2(const fvm::ScalarField2D& pred, const fvm::ScalarField2D& truth);

/// ||pred - truth||_2 / ||truth - mean(truth)||_2.
double mean_corrected_relative(const fvm::ScalarField2D& pred, const fvm::ScalarField2D& truth);

struct MetricsBundle {
  double eps_K = 0.0;
  double eps_h = 0.0;
  double eps_K_tilde = 0.0;
  double ssim = 1.0;
  bool evaluated_in_log = false;
};

/// Conductivity metrics in ln K when `log_domain` (values must be positive), else in K as given.
/// SSIM uses a 7x7 window and the dynamic range of the (transformed) truth.
MetricsBundle evaluate_fields(const fvm::ScalarField2D& K_pred, const fvm::ScalarField2D& K_true,
                              const fvm::ScalarField2D& h_pred, const fvm::ScalarField2D& h_true, bool log_domain);

fvm::ScalarField2D log_field(const fvm::ScalarField2D& K);

}  // namespace lf::metrics
