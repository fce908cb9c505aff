#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sattn/data/trajectory.hpp"
#include "sattn/data/windows.hpp"

namespace sattn::graph {

using data::PedId;
using data::Vec2;

// Directed spatial edge (from, to) with feature position(to) - position(from).
struct SpatialEdge {
  PedId from = 0;
  PedId to = 0;
  Vec2 feature;
};

// Self edge of a node present at t-1 and t; feature is its displacement.
struct TemporalEdge {
  PedId node = 0;
  Vec2 feature;
};

// One time step of the unrolled spatio-temporal graph.
struct STGraphStep {
  std::size_t t = 0;
  std::vector<PedId> nodes;       // ascending
  std::vector<Vec2> positions;    // node features, aligned with nodes
  std::vector<SpatialEdge> spatial_edges;    // all ordered pairs, sorted by (from, to)
  std::vector<TemporalEdge> temporal_edges;  // sorted by node

  std::optional<std::size_t> node_index(PedId ped) const;
  // Index into temporal_edges, if the node has a temporal edge at this step.
  std::optional<std::size_t> temporal_index(PedId ped) const;
};

// Builds a step from node positions at t and (optionally) at t-1. Every pair
// of present nodes is connected in both directions.
STGraphStep make_step(std::size_t t, const std::map<PedId, Vec2>& current,
                      const std::map<PedId, Vec2>* previous);

// The spatial edges (v, u) of node v, in ascending u. Throws DataError when v
// is not present at the step.
std::vector<SpatialEdge> neighbors(const STGraphStep& step, PedId v);

// Index range [first, last) of node v's outgoing edges in step.spatial_edges.
std::pair<std::size_t, std::size_t> neighbor_range(const STGraphStep& step, PedId v);

struct STGraphSequence {
  std::string window_id;
  std::vector<PedId> pedestrians;             // every ped in the window, ascending
  std::vector<STGraphStep> steps;             // one per window frame
  std::vector<std::vector<bool>> presence;    // [ped index][step]

  bool present(PedId ped, std::size_t t) const;
};

STGraphSequence build_sequence(const data::SequenceWindow& window);

}  // namespace sattn::graph
