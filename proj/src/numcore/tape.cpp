#include "sattn/numcore/tape.hpp"

#include <string>

#include "sattn/error.hpp"

namespace sattn::num {

const Tensor& Var::value() const {
  if (tape_ == nullptr) throw ShapeError("var: use of an empty handle");
  return tape_->value(*this);
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::leaf(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = tracking_;
  return push(std::move(n));
}

Var Tape::bind(const Tensor& external) {
  Node n;
  n.external = &external;
  n.requires_grad = tracking_;
  return push(std::move(n));
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
  bool needs_grad = false;
  for (const Var& in : inputs) {
    if (in.tape() != this) throw ShapeError("tape: operation input belongs to another tape");
    needs_grad = needs_grad || node(in).requires_grad;
  }
  Node n;
  n.value = std::move(value);
  n.requires_grad = tracking_ && needs_grad;
  if (n.requires_grad) n.backward = std::move(fn);
  return push(std::move(n));
}

Var Tape::record(Tensor value, const std::vector<Var>& inputs, BackwardFn fn) {
  bool needs_grad = false;
  for (const Var& in : inputs) {
    if (in.tape() != this) throw ShapeError("tape: operation input belongs to another tape");
    needs_grad = needs_grad || node(in).requires_grad;
  }
  Node n;
  n.value = std::move(value);
  n.requires_grad = tracking_ && needs_grad;
  if (n.requires_grad) n.backward = std::move(fn);
  return push(std::move(n));
}

const Tape::Node& Tape::node(Var v) const {
  if (v.tape() != this || v.index() >= nodes_.size()) {
    throw ShapeError("tape: value is not recorded on this tape");
  }
  return nodes_[v.index()];
}

Tape::Node& Tape::node(Var v) {
  if (v.tape() != this || v.index() >= nodes_.size()) {
    throw ShapeError("tape: value is not recorded on this tape");
  }
  return nodes_[v.index()];
}

const Tensor& Tape::value(Var v) const {
  const Node& n = node(v);
  return n.external != nullptr ? *n.external : n.value;
}

bool Tape::requires_grad(Var v) const { return node(v).requires_grad; }

Tensor Tape::grad(Var v) const {
  const Node& n = node(v);
  if (n.grad.size() == 0) return Tensor(value(v).shape());
  return n.grad;
}

Tensor& Tape::grad_buffer(Var v) {
  Node& n = node(v);
  if (n.grad.size() == 0 && element_count(value(v).shape()) > 0) {
    n.grad = Tensor(value(v).shape());
  }
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape() != this || loss.index() >= nodes_.size()) {
    throw ShapeError("backward: loss is not recorded on this tape");
  }
  if (value(loss).size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got shape " +
                     to_string(value(loss).shape()));
  }
  for (Node& n : nodes_) n.grad = Tensor();
  if (!nodes_[loss.index()].requires_grad) return;

  grad_buffer(loss)[0] = 1.0;
  for (std::size_t i = loss.index() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.size() == 0) continue;
    n.backward(*this, n.grad);
  }
}

}  // namespace sattn::num
