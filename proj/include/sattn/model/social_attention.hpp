#pragma once

#include <map>
#include <utility>
#include <vector>

#include "sattn/model/layers.hpp"
#include "sattn/model/params.hpp"
#include "sattn/stgraph/stgraph.hpp"

namespace sattn::model {

using data::PedId;

struct CellRows {
  num::RowRef h;
  num::RowRef c;
};

// Recurrent state after a step: one (h, c) pair per temporal edge, per
// directed spatial edge and per node present at that step. Entities without
// an entry start from zero.
struct HiddenState {
  std::map<PedId, CellRows> temporal;
  std::map<std::pair<PedId, PedId>, CellRows> spatial;
  std::map<PedId, CellRows> node;
};

struct AttentionRecord {
  PedId node = 0;
  std::size_t t = 0;
  std::vector<PedId> neighbors;  // ascending
  std::vector<double> weights;   // softmax weights, aligned with neighbors
  std::vector<double> context;   // attention output H_v
};

enum class EdgeKind { kSpatial, kTemporal };

// Advances a batch of edges of one kind: embeds the features and runs the
// kind's LSTM cell. Spatial and temporal kinds never share weights.
LstmOutput edge_step(EdgeKind kind, const BoundParams& params, num::Var h, num::Var c,
                     num::Var features);

struct NodeStepOutput {
  num::Var h;
  num::Var c;
  num::Var raw;  // N x 5, before the Gaussian head
};

// e_v = embed(x_v), a_v = embed(concat(h_vv, H_v)), node LSTM on
// concat(e_v, a_v), raw = linear output of the new node state.
NodeStepOutput node_step(const BoundParams& params, num::Var positions, num::Var temporal_states,
                         num::Var contexts, num::Var h, num::Var c);

struct StepOutput {
  std::vector<PedId> nodes;  // same order as the step's nodes
  num::Var raw;              // N x 5
  GaussianVars gaussian;     // prediction for the next step's positions
  std::vector<AttentionRecord> attention;  // social mode: one per node
  HiddenState state;
};

// One step of the model:
//   1. temporal edge RNNs,
//   2. spatial edge RNNs,
//   3. attention for every node over its spatial edges' new states, keyed by
//      its new temporal state (zero context when m = 0),
//   4. node RNNs,
//   5. Gaussian head.
// independent_lstm skips 2 and 3 and feeds a zero context.
StepOutput forward_step(const graph::STGraphStep& step, const HiddenState& previous,
                        const BoundParams& params, Mode mode);

// Reads the predicted distributions of a step off the tape.
std::vector<GaussianParams2D> gaussians(const StepOutput& out);

}  // namespace sattn::model
