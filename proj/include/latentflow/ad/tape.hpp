#pragma once

#include <functional>
#include <string>
#include <vector>

#include "latentflow/ad/tensor.hpp"

namespace lf::ad {

class Tape;

/// Handle to a value recorded on a tape.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const { return *tape_; }
  int id() const { return id_; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t size() const { return value().size(); }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Append-only record of a define-by-run computation.
///
/// Nodes are stored in creation order, which is a topological order by
/// construction. `backward` walks them once in reverse, calling each node's
/// local rule to push its gradient into its inputs.
class Tape {
 public:
  /// Receives the tape and the node index; reads `grad(node)` and accumulates
  /// into the gradients of the node's inputs.
  using Rule = std::function<void(Tape&, int)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor value, bool requires_grad = true);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  /// Records an op output. The node requires a gradient iff any input does.
  Var record(Tensor value, std::vector<int> inputs, Rule rule, const char* op);

  const Tensor& value(int id) const { return nodes_.at(id).value; }
  const std::vector<int>& inputs(int id) const { return nodes_.at(id).inputs; }
  bool requires_grad(int id) const { return nodes_.at(id).requires_grad; }
  const char* op(int id) const { return nodes_.at(id).op; }

  /// Gradient buffer of a node, allocated as zeros on first access.
  Tensor& grad_buffer(int id);
  /// Accumulated gradient; zeros when backward never reached the node.
  Tensor grad(Var v) const;
  bool has_grad(int id) const { return !nodes_.at(id).grad.empty(); }

  /// Reverse pass from a scalar output. Returns the number of nodes visited.
  std::size_t backward(Var output);

  std::size_t size() const { return nodes_.size(); }
  void zero_grad();

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<int> inputs;
    Rule rule;
    bool requires_grad = false;
    const char* op = "leaf";
  };
  std::vector<Node> nodes_;
};

}  // namespace lf::ad
