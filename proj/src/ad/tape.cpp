#include "latentflow/ad/tape.hpp"

#include <stdexcept>

namespace lf::ad {

const Tensor& Var::value() const {
  if (!tape_) throw std::logic_error("value() on an unbound Var");
  return tape_->value(id_);
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::record(Tensor value, std::vector<int> inputs, Rule rule, const char* op) {
  Node node;
  node.value = std::move(value);
  node.op = op;
  for (int in : inputs) {
    if (in < 0 || in >= static_cast<int>(nodes_.size()))
      throw std::logic_error(std::string(op) + ": input does not precede its consumer on the tape");
    node.requires_grad = node.requires_grad || nodes_[in].requires_grad;
  }
  node.inputs = std::move(inputs);
  if (node.requires_grad) node.rule = std::move(rule);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Tensor& Tape::grad_buffer(int id) {
  Node& node = nodes_.at(id);
  if (node.grad.empty()) node.grad = Tensor(node.value.shape(), 0.0);
  return node.grad;
}

Tensor Tape::grad(Var v) const {
  const Node& node = nodes_.at(v.id());
  if (node.grad.empty()) return Tensor(node.value.shape(), 0.0);
  return node.grad;
}

std::size_t Tape::backward(Var output) {
  if (&output.tape() != this) throw std::logic_error("backward: output belongs to a different tape");
  const Tensor& out = value(output.id());
  if (out.size() != 1)
    throw std::invalid_argument("backward: output must be scalar, got shape " + shape_str(out.shape()));
  grad_buffer(output.id()).fill(1.0);
  std::size_t visited = 0;
  for (int id = output.id(); id >= 0; --id) {
    ++visited;
    Node& node = nodes_[id];
    if (!node.requires_grad || !node.rule || node.grad.empty()) continue;
    node.rule(*this, id);
  }
  return visited;
}

void Tape::zero_grad() {
  for (Node& node : nodes_) node.grad = Tensor();
}

}  // namespace lf::ad
