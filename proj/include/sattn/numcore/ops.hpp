#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sattn/numcore/tape.hpp"

// Differentiable primitives. Every function records onto the tape of its
// inputs; all inputs of one call must share a tape. Shape problems raise
// ShapeError naming the operation and the offending shapes.
namespace sattn::num {

// (m x k) * (k x n)
Var matmul(Var a, Var b);
// a * b^T: (m x k) * (n x k)^T
Var matmul_nt(Var a, Var b);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // elementwise
Var scale(Var a, double factor);
// Adds a 1 x n row to every row of an m x n matrix.
Var add_bias(Var a, Var bias);

Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);  // subgradient 0 at the kink
Var exp(Var a);
// Elementwise clamp; gradient passes only strictly inside (lo, hi).
Var clamp(Var a, double lo, double hi);

// Concatenation along the last axis; all parts have the same row count.
Var concat(std::span<const Var> parts);
Var concat(Var a, Var b);
Var slice_cols(Var a, std::size_t begin, std::size_t end);

// Softmax over all entries of a single-row value. Uses max subtraction and a
// sorted (permutation-invariant) normaliser sum.
Var softmax(Var a);

// weights (1 x m) times rows (m x n) -> 1 x n. Each output column is summed
// in sorted order, so the result is bitwise invariant under any joint
// permutation of weights and rows.
Var weighted_row_sum(Var weights, Var rows);

// Row selection. A RowRef without a source contributes a zero row.
struct RowRef {
  Var source;
  std::size_t row = 0;
};
Var assemble_rows(Tape& tape, std::span<const RowRef> refs, std::size_t cols);

Var sum(Var a);       // 1 x 1
Var dot(Var a, Var b);  // 1 x 1, same shapes

}  // namespace sattn::num
