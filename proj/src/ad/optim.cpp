#include "latentflow/ad/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace lf::ad {
namespace {

void validate(const ParameterSet& params, const GradMap& grads) {
  for (const std::string& name : params.names()) {
    auto it = grads.find(name);
    if (it == grads.end()) throw std::invalid_argument("optimizer: missing gradient for '" + name + "'");
    if (it->second.shape() != params.at(name).shape())
      throw std::invalid_argument("optimizer: gradient shape " + shape_str(it->second.shape()) + " for '" + name +
                                  "' of shape " + shape_str(params.at(name).shape()));
    if (!it->second.all_finite()) throw std::domain_error("optimizer: non-finite gradient for '" + name + "'");
  }
}

}  // namespace

Adam::Adam(AdamConfig config) : config_(config) {
  if (!(config_.lr > 0.0)) throw std::invalid_argument("Adam: learning rate must be positive");
}

void Adam::set_lr(double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("Adam: learning rate must be positive");
  config_.lr = lr;
}

void Adam::step(ParameterSet& params, const GradMap& grads) {
  validate(params, grads);
  ++step_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (const std::string& name : params.names()) {
    Tensor& p = params.at(name);
    const Tensor& g = grads.at(name);
    auto [mit, m_new] = m_.try_emplace(name, p.shape(), 0.0);
    auto [vit, v_new] = v_.try_emplace(name, p.shape(), 0.0);
    Tensor& m = mit->second;
    Tensor& v = vit->second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p[i] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
  }
}

ParameterSet Adam::export_state() const {
  ParameterSet state;
  state.add("adam.step", Tensor::scalar(static_cast<double>(step_)));
  for (const auto& [name, m] : m_) state.add("adam.m/" + name, m);
  for (const auto& [name, v] : v_) state.add("adam.v/" + name, v);
  return state;
}

void Adam::import_state(const ParameterSet& state) {
  m_.clear();
  v_.clear();
  step_ = static_cast<std::uint64_t>(state.at("adam.step").item());
  for (const std::string& key : state.names()) {
    if (key.rfind("adam.m/", 0) == 0) m_.emplace(key.substr(7), state.at(key));
    if (key.rfind("adam.v/", 0) == 0) v_.emplace(key.substr(7), state.at(key));
  }
}

void sgd_step(ParameterSet& params, const GradMap& grads, double lr) {
  validate(params, grads);
  for (const std::string& name : params.names()) {
    Tensor& p = params.at(name);
    const Tensor& g = grads.at(name);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
  }
}

}  // namespace lf::ad
