#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sattn/numcore/tensor.hpp"

namespace sattn::num {

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape
// lives.
class Var {
 public:
  Var() = default;

  bool valid() const noexcept { return tape_ != nullptr; }
  Tape* tape() const noexcept { return tape_; }
  std::uint32_t index() const noexcept { return index_; }

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t index) : tape_(tape), index_(index) {}

  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
};

// Ordered record of primitive operations for reverse-mode differentiation.
//
// Records are appended in evaluation order, so every record's inputs precede
// it. backward() walks the records once, in reverse, and each record adds its
// contribution into its inputs' gradient buffers. Accumulation order is fixed
// by the tape, which makes gradients reproducible bit for bit.
//
// With tracking disabled the tape still stores values (Vars stay usable) but
// drops the backward rules.
class Tape {
 public:
  // Receives the gradient of the loss with respect to the record's output.
  using BackwardFn = std::function<void(Tape&, const Tensor& out_grad)>;

  explicit Tape(bool tracking = true) : tracking_(tracking) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool tracking() const noexcept { return tracking_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  // Untracked input; never receives a gradient.
  Var constant(Tensor value);
  // Tracked input owned by the tape.
  Var leaf(Tensor value);
  // Tracked input referencing an external tensor (model parameters). The
  // tensor must outlive the tape and stay unmodified while the tape is used.
  Var bind(const Tensor& external);

  // Appends an operation result. The backward rule is kept only when
  // tracking is on and some input requires a gradient.
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var record(Tensor value, const std::vector<Var>& inputs, BackwardFn fn);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const;

  // Gradient of the last backward() loss with respect to v. Zero-filled when
  // v was not reached.
  Tensor grad(Var v) const;

  // Mutable gradient buffer, zero-initialised on first use. For backward
  // rules.
  Tensor& grad_buffer(Var v);

  // Computes d loss / d v for every tracked record. loss must be a 1-element
  // value recorded on this tape. Earlier gradients are discarded.
  void backward(Var loss);

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    BackwardFn backward;
    bool requires_grad = false;
  };

  const Node& node(Var v) const;
  Node& node(Var v);
  Var push(Node node);

  bool tracking_;
  std::vector<Node> nodes_;
};

}  // namespace sattn::num
