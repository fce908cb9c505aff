#include "sattn/model/layers.hpp"

#include <cmath>

#include "sattn/error.hpp"

namespace sattn::model {

num::Var linear(num::Var x, const BoundLinear& layer) {
  return num::add_bias(num::matmul(x, layer.weight), layer.bias);
}

num::Var embed(num::Var x, const BoundLinear& layer) { return num::relu(linear(x, layer)); }

LstmOutput lstm_step(num::Var h, num::Var c, num::Var input, const BoundLstm& cell) {
  const std::size_t n = cell.hidden;
  if (h.cols() != n || c.cols() != n || h.rows() != input.rows() || c.rows() != input.rows()) {
    throw ShapeError("lstm_step: state " + num::to_string(h.shape()) + "/" +
                     num::to_string(c.shape()) + " does not match input " +
                     num::to_string(input.shape()) + " for hidden size " + std::to_string(n));
  }
  const num::Var z = num::add_bias(num::matmul(num::concat(input, h), cell.weight), cell.bias);
  const num::Var in_gate = num::sigmoid(num::slice_cols(z, 0, n));
  const num::Var forget_gate = num::sigmoid(num::slice_cols(z, n, 2 * n));
  const num::Var candidate = num::tanh(num::slice_cols(z, 2 * n, 3 * n));
  const num::Var out_gate = num::sigmoid(num::slice_cols(z, 3 * n, 4 * n));
  const num::Var c_next = num::add(num::mul(forget_gate, c), num::mul(in_gate, candidate));
  const num::Var h_next = num::mul(out_gate, num::tanh(c_next));
  return {h_next, c_next};
}

num::Var scaled_scores(num::Var query, num::Var keys) {
  const double m = static_cast<double>(keys.rows());
  const double d = static_cast<double>(query.cols());
  return num::scale(num::matmul_nt(query, keys), m / std::sqrt(d));
}

num::Var attention_scores(num::Var temporal_state, num::Var spatial_states, num::Var query_weight,
                          num::Var key_weight) {
  if (spatial_states.rows() == 0) {
    throw ShapeError("attention_scores: node has no spatial edges (m = 0)");
  }
  return scaled_scores(num::matmul(temporal_state, query_weight),
                       num::matmul(spatial_states, key_weight));
}

AttentionOutput attention_combine(num::Var scores, num::Var spatial_states) {
  const num::Var weights = num::softmax(scores);
  return {weights, num::weighted_row_sum(weights, spatial_states)};
}

GaussianParams2D gaussian_head(std::span<const double> raw) {
  if (raw.size() != 5) throw ShapeError("gaussian_head: expected 5 values, got " + std::to_string(raw.size()));
  for (const double v : raw) {
    if (!std::isfinite(v)) throw NumericalError("gaussian_head: non-finite raw output");
  }
  return {{raw[0], raw[1]}, {std::exp(raw[2]), std::exp(raw[3])}, std::tanh(raw[4])};
}

GaussianVars gaussian_head(num::Var raw) {
  if (raw.cols() != 5) throw ShapeError("gaussian_head: expected N x 5, got " + num::to_string(raw.shape()));
  return {num::slice_cols(raw, 0, 2), num::exp(num::slice_cols(raw, 2, 4)),
          num::tanh(num::slice_cols(raw, 4, 5))};
}

}  // namespace sattn::model
