#include "sattn/model/social_attention.hpp"

#include "sattn/error.hpp"

namespace sattn::model {

using num::RowRef;
using num::Tensor;
using num::Var;

LstmOutput edge_step(EdgeKind kind, const BoundParams& params, Var h, Var c, Var features) {
  const bool spatial = kind == EdgeKind::kSpatial;
  const BoundLinear& embedding = spatial ? params.spatial_embed : params.temporal_embed;
  const BoundLstm& cell = spatial ? params.spatial_lstm : params.temporal_lstm;
  return lstm_step(h, c, embed(features, embedding), cell);
}

NodeStepOutput node_step(const BoundParams& params, Var positions, Var temporal_states,
                         Var contexts, Var h, Var c) {
  const Var e = embed(positions, params.node_embed_position);
  const Var a = embed(num::concat(temporal_states, contexts), params.node_embed_context);
  const LstmOutput next = lstm_step(h, c, num::concat(e, a), params.node_lstm);
  return {next.h, next.c, linear(next.h, params.node_output)};
}

namespace {

Tensor feature_matrix(const std::vector<data::Vec2>& features) {
  Tensor t = Tensor::zeros(features.size(), 2);
  for (std::size_t i = 0; i < features.size(); ++i) {
    t.at(i, 0) = features[i].x;
    t.at(i, 1) = features[i].y;
  }
  return t;
}

template <class Key>
std::pair<Var, Var> previous_rows(num::Tape& tape, const std::map<Key, CellRows>& states,
                                  const std::vector<Key>& keys, std::size_t width) {
  std::vector<RowRef> h_refs(keys.size()), c_refs(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto it = states.find(keys[i]);
    if (it == states.end()) continue;
    h_refs[i] = it->second.h;
    c_refs[i] = it->second.c;
  }
  return {num::assemble_rows(tape, h_refs, width), num::assemble_rows(tape, c_refs, width)};
}

}  // namespace

StepOutput forward_step(const graph::STGraphStep& step, const HiddenState& previous,
                        const BoundParams& params, Mode mode) {
  if (params.tape == nullptr) throw ShapeError("forward_step: parameters are not bound to a tape");
  num::Tape& tape = *params.tape;
  const ModelConfig& cfg = params.config;
  const std::size_t n = step.nodes.size();
  const std::size_t edge_width = cfg.edge_hidden;

  StepOutput out;
  out.nodes = step.nodes;

  // 1. temporal edges
  Var temporal_h;
  {
    std::vector<PedId> keys;
    std::vector<data::Vec2> features;
    for (const auto& e : step.temporal_edges) {
      keys.push_back(e.node);
      features.push_back(e.feature);
    }
    if (!keys.empty()) {
      const auto [h0, c0] = previous_rows(tape, previous.temporal, keys, edge_width);
      const LstmOutput next =
          edge_step(EdgeKind::kTemporal, params, h0, c0, tape.constant(feature_matrix(features)));
      temporal_h = next.h;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        out.state.temporal[keys[i]] = {{next.h, i}, {next.c, i}};
      }
    }
  }

  // 2. spatial edges
  const bool social = mode == Mode::kSocialAttention;
  Var spatial_h;
  if (social && !step.spatial_edges.empty()) {
    std::vector<std::pair<PedId, PedId>> keys;
    std::vector<data::Vec2> features;
    for (const auto& e : step.spatial_edges) {
      keys.emplace_back(e.from, e.to);
      features.push_back(e.feature);
    }
    const auto [h0, c0] = previous_rows(tape, previous.spatial, keys, edge_width);
    const LstmOutput next =
        edge_step(EdgeKind::kSpatial, params, h0, c0, tape.constant(feature_matrix(features)));
    spatial_h = next.h;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      out.state.spatial[keys[i]] = {{next.h, i}, {next.c, i}};
    }
  }

  // 3. attention
  std::vector<RowRef> temporal_refs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (const auto k = step.temporal_index(step.nodes[i])) temporal_refs[i] = {temporal_h, *k};
  }
  const Var temporal_states = num::assemble_rows(tape, temporal_refs, edge_width);

  Var contexts;
  if (social) {
    std::vector<RowRef> context_refs(n);
    if (spatial_h.valid()) {
      const std::size_t d = cfg.attention_dim;
      const Var queries = num::matmul(temporal_states, params.attention_query);
      const Var keys = num::matmul(spatial_h, params.attention_key);
      for (std::size_t i = 0; i < n; ++i) {
        const auto [first, last] = graph::neighbor_range(step, step.nodes[i]);
        AttentionRecord record;
        record.node = step.nodes[i];
        record.t = step.t;
        if (first == last) {
          out.attention.push_back(std::move(record));
          continue;
        }
        std::vector<RowRef> key_refs, state_refs;
        for (std::size_t k = first; k < last; ++k) {
          key_refs.push_back({keys, k});
          state_refs.push_back({spatial_h, k});
          record.neighbors.push_back(step.spatial_edges[k].to);
        }
        const RowRef query_ref{queries, i};
        const Var q = num::assemble_rows(tape, std::span<const RowRef>(&query_ref, 1), d);
        const Var scores = scaled_scores(q, num::assemble_rows(tape, key_refs, d));
        const AttentionOutput att =
            attention_combine(scores, num::assemble_rows(tape, state_refs, edge_width));
        context_refs[i] = {att.context, 0};
        const auto w = att.weights.value().data();
        const auto ctx = att.context.value().data();
        record.weights.assign(w.begin(), w.end());
        record.context.assign(ctx.begin(), ctx.end());
        out.attention.push_back(std::move(record));
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        AttentionRecord record;
        record.node = step.nodes[i];
        record.t = step.t;
        out.attention.push_back(std::move(record));
      }
    }
    contexts = num::assemble_rows(tape, context_refs, edge_width);
  } else {
    contexts = tape.constant(Tensor::zeros(n, edge_width));
  }

  // 4. node RNNs
  const Var positions = tape.constant(feature_matrix(step.positions));
  const auto [h0, c0] = previous_rows(tape, previous.node, step.nodes, cfg.node_hidden);
  const NodeStepOutput node = node_step(params, positions, temporal_states, contexts, h0, c0);
  for (std::size_t i = 0; i < n; ++i) {
    out.state.node[step.nodes[i]] = {{node.h, i}, {node.c, i}};
  }

  // 5. Gaussian head
  out.raw = node.raw;
  out.gaussian = gaussian_head(node.raw);
  if (cfg.residual_mean) out.gaussian.mean = num::add(out.gaussian.mean, positions);
  return out;
}

std::vector<GaussianParams2D> gaussians(const StepOutput& out) {
  std::vector<GaussianParams2D> result;
  const Tensor& mean = out.gaussian.mean.value();
  const Tensor& sigma = out.gaussian.sigma.value();
  const Tensor& rho = out.gaussian.rho.value();
  for (std::size_t i = 0; i < out.nodes.size(); ++i) {
    result.push_back({{mean.at(i, 0), mean.at(i, 1)}, {sigma.at(i, 0), sigma.at(i, 1)}, rho[i]});
  }
  return result;
}

}  // namespace sattn::model
