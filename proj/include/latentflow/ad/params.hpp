#pragma once

#include <map>
#include <string>
#include <vector>

#include "latentflow/ad/tape.hpp"
#include "latentflow/common/rng.hpp"

namespace lf::ad {

/// Ordered collection of named parameter tensors.
class ParameterSet {
 public:
  Tensor& add(const std::string& name, Tensor init);
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  bool contains(const std::string& name) const { return tensors_.count(name) > 0; }
  const std::vector<std::string>& names() const { return order_; }
  std::size_t count() const { return order_.size(); }
  std::size_t total_size() const;
  /// Order-sensitive FNV checksum of every value bit pattern.
  std::uint64_t checksum() const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, Tensor> tensors_;
};

using GradMap = std::map<std::string, Tensor>;

/// Parameters inserted as leaves on one tape.
class BoundParams {
 public:
  BoundParams(Tape& tape, const ParameterSet& params, bool requires_grad);

  Var operator[](const std::string& name) const;
  bool contains(const std::string& name) const { return vars_.count(name) > 0; }
  /// Gradients of every bound parameter (zeros where backward did not reach).
  GradMap gradients() const;

 private:
  Tape* tape_;
  std::map<std::string, Var> vars_;
};

/// He-normal initialiser: std = sqrt(2 / fan_in) * gain.
Tensor he_normal(Shape shape, std::size_t fan_in, Rng& rng, double gain = 1.0);

}  // namespace lf::ad
