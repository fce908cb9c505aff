#include <gtest/gtest.h>

#include <algorithm>

#include "sattn/data/synth.hpp"
#include "sattn/data/windows.hpp"
#include "sattn/error.hpp"
#include "sattn/stgraph/stgraph.hpp"

using namespace sattn;
using namespace sattn::graph;

namespace {

std::map<PedId, Vec2> three_peds() { return {{1, {0.0, 0.0}}, {2, {1.0, 2.0}}, {3, {-1.0, 0.5}}}; }

}  // namespace

TEST(MakeStep, ThreePedestriansGiveSixSpatialAndThreeTemporalEdges) {
  const auto current = three_peds();
  std::map<PedId, Vec2> previous;
  for (const auto& [id, p] : current) previous[id] = {p.x - 0.1, p.y};
  const STGraphStep step = make_step(4, current, &previous);
  EXPECT_EQ(step.nodes, (std::vector<PedId>{1, 2, 3}));
  EXPECT_EQ(step.spatial_edges.size(), 6u);
  EXPECT_EQ(step.temporal_edges.size(), 3u);
  for (const auto& e : step.temporal_edges) {
    EXPECT_NEAR(e.feature.x, 0.1, 1e-12);
    EXPECT_EQ(e.feature.y, 0.0);
  }
}

TEST(MakeStep, SpatialFeatureIsRelativePosition) {
  const STGraphStep step = make_step(0, {{1, {0.0, 0.0}}, {2, {1.0, 2.0}}}, nullptr);
  ASSERT_EQ(step.spatial_edges.size(), 2u);
  EXPECT_EQ(step.spatial_edges[0].from, 1);
  EXPECT_EQ(step.spatial_edges[0].to, 2);
  EXPECT_EQ(step.spatial_edges[0].feature, (Vec2{1.0, 2.0}));
  EXPECT_EQ(step.spatial_edges[1].feature, (Vec2{-1.0, -2.0}));
  EXPECT_TRUE(step.temporal_edges.empty());
}

TEST(MakeStep, SingleNodeHasNoSpatialEdges) {
  const STGraphStep step = make_step(0, {{7, {3.0, 4.0}}}, nullptr);
  EXPECT_TRUE(step.spatial_edges.empty());
  EXPECT_EQ(step.positions[0], (Vec2{3.0, 4.0}));
}

TEST(MakeStep, TemporalEdgeOnlyForNodesPresentBefore) {
  const std::map<PedId, Vec2> previous{{2, {1.0, 1.0}}};
  const STGraphStep step = make_step(1, three_peds(), &previous);
  ASSERT_EQ(step.temporal_edges.size(), 1u);
  EXPECT_EQ(step.temporal_edges[0].node, 2);
  EXPECT_EQ(step.temporal_edges[0].feature, (Vec2{0.0, 1.0}));
  EXPECT_FALSE(step.temporal_index(1).has_value());
  EXPECT_EQ(step.temporal_index(2), 0u);
}

TEST(MakeStep, EdgeFeaturesAreAntisymmetric) {
  const STGraphStep step = make_step(0, three_peds(), nullptr);
  for (const auto& e : step.spatial_edges) {
    const auto reverse = std::find_if(step.spatial_edges.begin(), step.spatial_edges.end(),
                                      [&](const SpatialEdge& r) { return r.from == e.to && r.to == e.from; });
    ASSERT_NE(reverse, step.spatial_edges.end());
    EXPECT_EQ(reverse->feature.x, -e.feature.x);
    EXPECT_EQ(reverse->feature.y, -e.feature.y);
  }
}

TEST(Neighbors, AscendingByTarget) {
  const STGraphStep step = make_step(0, three_peds(), nullptr);
  const auto n2 = neighbors(step, 2);
  ASSERT_EQ(n2.size(), 2u);
  EXPECT_EQ(n2[0].to, 1);
  EXPECT_EQ(n2[1].to, 3);
  const auto [first, last] = neighbor_range(step, 2);
  EXPECT_EQ(last - first, 2u);
  EXPECT_EQ(step.spatial_edges[first].from, 2);
}

TEST(Neighbors, AbsentNodeIsAnError) {
  const STGraphStep step = make_step(0, three_peds(), nullptr);
  EXPECT_THROW(neighbors(step, 9), DataError);
}

TEST(Neighbors, RelabelingPermutesTheEdgeSet) {
  // Swap labels 1 and 3: the multiset of (position(from), feature) pairs is unchanged.
  const auto a = three_peds();
  std::map<PedId, Vec2> b{{1, a.at(3)}, {2, a.at(2)}, {3, a.at(1)}};
  const STGraphStep sa = make_step(0, a, nullptr);
  const STGraphStep sb = make_step(0, b, nullptr);
  auto key = [](const STGraphStep& s) {
    std::vector<std::tuple<double, double, double, double>> out;
    for (const auto& e : s.spatial_edges) {
      const Vec2 p = s.positions[*s.node_index(e.from)];
      out.emplace_back(p.x, p.y, e.feature.x, e.feature.y);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  EXPECT_EQ(key(sa), key(sb));
}

TEST(BuildSequence, OneStepPerFrameWithPresence) {
  std::string text;
  for (int f = 0; f < 20; ++f) {
    text += std::to_string(f) + "\t1\t" + std::to_string(0.1 * f) + "\t0.0\n";
    if (f >= 10 && f < 15) text += std::to_string(f) + "\t2\t1.0\t" + std::to_string(0.2 * f) + "\n";
  }
  const auto windows = data::window_sequences(data::parse_canonical(text), {8, 20, 1});
  const STGraphSequence seq = build_sequence(windows.at(0));
  ASSERT_EQ(seq.steps.size(), 20u);
  EXPECT_EQ(seq.pedestrians, (std::vector<PedId>{1, 2}));
  EXPECT_FALSE(seq.present(2, 9));
  EXPECT_TRUE(seq.present(2, 10));
  EXPECT_FALSE(seq.present(2, 15));
  EXPECT_EQ(seq.steps[10].nodes.size(), 2u);
  EXPECT_FALSE(seq.steps[10].temporal_index(2).has_value());
  EXPECT_TRUE(seq.steps[11].temporal_index(2).has_value());
  EXPECT_TRUE(seq.steps[0].temporal_edges.empty());
  for (std::size_t t = 0; t < 20; ++t) EXPECT_EQ(seq.steps[t].t, t);
}
