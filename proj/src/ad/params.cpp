#include "latentflow/ad/params.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace lf::ad {

Tensor& ParameterSet::add(const std::string& name, Tensor init) {
  if (tensors_.count(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
  order_.push_back(name);
  return tensors_[name] = std::move(init);
}

Tensor& ParameterSet::at(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParameterSet::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParameterSet::total_size() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors_) n += t.size();
  return n;
}

std::uint64_t ParameterSet::checksum() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  };
  for (const std::string& name : order_) {
    for (char c : name) mix(static_cast<unsigned char>(c));
    for (double v : tensors_.at(name).values()) mix(std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

BoundParams::BoundParams(Tape& tape, const ParameterSet& params, bool requires_grad) : tape_(&tape) {
  for (const std::string& name : params.names()) vars_.emplace(name, tape.leaf(params.at(name), requires_grad));
}

Var BoundParams::operator[](const std::string& name) const {
  auto it = vars_.find(name);
  if (it == vars_.end()) throw std::out_of_range("parameter '" + name + "' is not bound");
  return it->second;
}

GradMap BoundParams::gradients() const {
  GradMap out;
  for (const auto& [name, var] : vars_) out.emplace(name, tape_->grad(var));
  return out;
}

Tensor he_normal(Shape shape, std::size_t fan_in, Rng& rng, double gain) {
  Tensor t(std::move(shape));
  const double std = gain * std::sqrt(2.0 / static_cast<double>(fan_in));
  for (double& v : t.values()) v = std * rng.normal();
  return t;
}

}  // namespace lf::ad
