#pragma once

#include <span>

#include "sattn/data/trajectory.hpp"
#include "sattn/model/params.hpp"
#include "sattn/numcore/ops.hpp"

namespace sattn::model {

// x * W + b
num::Var linear(num::Var x, const BoundLinear& layer);

// relu(x * W + b); one embedding per input row.
num::Var embed(num::Var x, const BoundLinear& layer);

struct LstmOutput {
  num::Var h;
  num::Var c;
};

// i, f, o = sigmoid gates, g = tanh candidate,
// c' = f * c + i * g, h' = o * tanh(c'). Rows are independent sequences.
LstmOutput lstm_step(num::Var h, num::Var c, num::Var input, const BoundLstm& cell);

// (m / sqrt(d)) * <q, k_i> for already projected query (1 x d) and keys (m x d).
num::Var scaled_scores(num::Var query, num::Var keys);

// Scores of one node's temporal edge state (1 x H) against its m spatial edge
// states (m x H): (m / sqrt(d_e)) * <W1 h_vv, W2 h_vi>. Requires m >= 1.
num::Var attention_scores(num::Var temporal_state, num::Var spatial_states, num::Var query_weight,
                          num::Var key_weight);

struct AttentionOutput {
  num::Var weights;  // 1 x m, softmax of the scores
  num::Var context;  // 1 x H, weighted sum of the spatial states
};

AttentionOutput attention_combine(num::Var scores, num::Var spatial_states);

struct GaussianParams2D {
  data::Vec2 mean;
  data::Vec2 sigma;
  double rho = 0.0;
};

// |rho| is kept at or below this before it enters the likelihood.
inline constexpr double kRhoLimit = 0.999;

// raw (5) -> mean = raw[0..1], sigma = exp(raw[2..3]), rho = tanh(raw[4]).
// Throws NumericalError for non-finite input.
GaussianParams2D gaussian_head(std::span<const double> raw);

struct GaussianVars {
  num::Var mean;   // N x 2
  num::Var sigma;  // N x 2
  num::Var rho;    // N x 1, unclamped
};

GaussianVars gaussian_head(num::Var raw);

}  // namespace sattn::model
