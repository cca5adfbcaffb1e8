#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "latentflow/ad/params.hpp"

namespace lf::ad {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam. Moment buffers are created lazily per parameter name.
class Adam {
 public:
  explicit Adam(AdamConfig config = {});

  /// Throws before touching any state if a gradient is missing, mis-shaped or non-finite.
  void step(ParameterSet& params, const GradMap& grads);

  std::uint64_t steps() const { return step_; }
  const AdamConfig& config() const { return config_; }
  void set_lr(double lr);

  /// Moments and step count as named tensors ("adam.m/<name>", "adam.v/<name>", "adam.step").
  ParameterSet export_state() const;
  void import_state(const ParameterSet& state);

 private:
  AdamConfig config_;
  std::uint64_t step_ = 0;
  std::map<std::string, Tensor> m_;
  std::map<std::string, Tensor> v_;
};

/// Plain gradient descent: p <- p - lr * g.
void sgd_step(ParameterSet& params, const GradMap& grads, double lr);

}  // namespace lf::ad
