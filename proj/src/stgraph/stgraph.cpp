#include "sattn/stgraph/stgraph.hpp"

#include <algorithm>

#include "sattn/error.hpp"

namespace sattn::graph {

std::optional<std::size_t> STGraphStep::node_index(PedId ped) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), ped);
  if (it == nodes.end() || *it != ped) return std::nullopt;
  return static_cast<std::size_t>(it - nodes.begin());
}

std::optional<std::size_t> STGraphStep::temporal_index(PedId ped) const {
  const auto it = std::lower_bound(temporal_edges.begin(), temporal_edges.end(), ped,
                                   [](const TemporalEdge& e, PedId id) { return e.node < id; });
  if (it == temporal_edges.end() || it->node != ped) return std::nullopt;
  return static_cast<std::size_t>(it - temporal_edges.begin());
}

STGraphStep make_step(std::size_t t, const std::map<PedId, Vec2>& current,
                      const std::map<PedId, Vec2>* previous) {
  STGraphStep step;
  step.t = t;
  for (const auto& [ped, pos] : current) {
    step.nodes.push_back(ped);
    step.positions.push_back(pos);
  }
  for (const auto& [from, from_pos] : current) {
    for (const auto& [to, to_pos] : current) {
      if (from == to) continue;
      step.spatial_edges.push_back({from, to, to_pos - from_pos});
    }
  }
  if (previous != nullptr) {
    for (const auto& [ped, pos] : current) {
      const auto it = previous->find(ped);
      if (it != previous->end()) step.temporal_edges.push_back({ped, pos - it->second});
    }
  }
  return step;
}

std::pair<std::size_t, std::size_t> neighbor_range(const STGraphStep& step, PedId v) {
  if (!step.node_index(v).has_value()) {
    throw DataError("neighbors: ped " + std::to_string(v) + " is not present at step " +
                    std::to_string(step.t));
  }
  const auto first = std::lower_bound(step.spatial_edges.begin(), step.spatial_edges.end(), v,
                                      [](const SpatialEdge& e, PedId id) { return e.from < id; });
  const auto last = std::upper_bound(first, step.spatial_edges.end(), v,
                                     [](PedId id, const SpatialEdge& e) { return id < e.from; });
  return {static_cast<std::size_t>(first - step.spatial_edges.begin()),
          static_cast<std::size_t>(last - step.spatial_edges.begin())};
}

std::vector<SpatialEdge> neighbors(const STGraphStep& step, PedId v) {
  const auto [first, last] = neighbor_range(step, v);
  return {step.spatial_edges.begin() + static_cast<std::ptrdiff_t>(first),
          step.spatial_edges.begin() + static_cast<std::ptrdiff_t>(last)};
}

bool STGraphSequence::present(PedId ped, std::size_t t) const {
  const auto it = std::lower_bound(pedestrians.begin(), pedestrians.end(), ped);
  if (it == pedestrians.end() || *it != ped || t >= steps.size()) return false;
  return presence[static_cast<std::size_t>(it - pedestrians.begin())][t];
}

STGraphSequence build_sequence(const data::SequenceWindow& window) {
  STGraphSequence seq;
  seq.window_id = window.id();
  seq.pedestrians = window.pedestrians();
  seq.presence.assign(seq.pedestrians.size(), std::vector<bool>(window.frames.size(), false));

  std::map<PedId, Vec2> previous;
  for (std::size_t t = 0; t < window.frames.size(); ++t) {
    std::map<PedId, Vec2> current;
    for (const auto& o : window.frames[t].entries) current.emplace(o.ped_id, o.position);
    seq.steps.push_back(make_step(t, current, t > 0 ? &previous : nullptr));
    for (const auto& [ped, pos] : current) {
      const auto idx = std::lower_bound(seq.pedestrians.begin(), seq.pedestrians.end(), ped) -
                       seq.pedestrians.begin();
      seq.presence[static_cast<std::size_t>(idx)][t] = true;
    }
    previous = std::move(current);
  }
  return seq;
}

}  // namespace sattn::graph
