#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "sattn/data/convert.hpp"
#include "sattn/data/synth.hpp"
#include "sattn/data/trajectory.hpp"
#include "sattn/data/windows.hpp"
#include "sattn/error.hpp"

using namespace sattn;
using namespace sattn::data;

namespace {

TrajectorySet dense_scene(std::size_t frames, std::size_t peds, const std::string& id = "s") {
  std::vector<Vec2> starts, velocities;
  for (std::size_t i = 0; i < peds; ++i) {
    starts.push_back({static_cast<double>(i), 0.0});
    velocities.push_back({0.1, 0.05 * static_cast<double>(i)});
  }
  return constant_velocity_scene(starts, velocities, frames, id);
}

}  // namespace

TEST(ParseCanonical, GroupsFramesAndPedestrians) {
  const TrajectorySet set = parse_canonical("0\t1\t0.0\t0.0\n10\t1\t1.0\t0.0");
  ASSERT_EQ(set.frames.size(), 2u);
  EXPECT_EQ(set.frames[1].frame_id, 10);
  EXPECT_EQ(set.frames[1].entries[0].ped_id, 1);
  EXPECT_EQ(set.frames[1].entries[0].position, (Vec2{1.0, 0.0}));
}

TEST(ParseCanonical, EmptyStreamHasNoObservations) {
  try {
    parse_canonical("");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("no observations"), std::string::npos);
  }
  EXPECT_THROW(parse_canonical("# only a comment\n\n"), DataError);
}

TEST(ParseCanonical, MalformedLineReportsLineNumber) {
  try {
    parse_canonical("0\t1\t0.0\t0.0\n1\t1\tabc\t0.0\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_canonical("0\t1\t0.0\n"), DataError);
}

TEST(ParseCanonical, DuplicateObservationIsAnError) {
  EXPECT_THROW(parse_canonical("0\t1\t0.0\t0.0\n0\t1\t1.0\t0.0\n"), DataError);
}

TEST(ParseCanonical, SortsFramesAndEntries) {
  const TrajectorySet set = parse_canonical("# c\n2\t5\t1.5\t2.5\n0\t7\t0.0\t0.0\n0\t3\t1.0\t-1.0\n");
  ASSERT_EQ(set.frames.size(), 2u);
  EXPECT_EQ(set.frames[0].frame_id, 0);
  EXPECT_EQ(set.frames[0].entries[0].ped_id, 3);
  EXPECT_EQ(set.frames[0].entries[1].ped_id, 7);
}

TEST(Serialize, RoundTripNormalizesText) {
  const std::string messy = "# header\n3\t2\t0.5\t-1.25\n\n0\t1\t1\t2.0\n";
  const std::string normalized = "0\t1\t1.0\t2.0\n3\t2\t0.5\t-1.25\n";
  EXPECT_EQ(serialize(parse_canonical(messy)), normalized);
}

TEST(Serialize, ParseOfSerializeIsIdentity) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrajectorySet set = synth_scene(SceneKind::kCrossing, 4, 25, seed);
    set.scene_id = "";
    EXPECT_EQ(parse_canonical(serialize(set)), set) << "seed " << seed;
  }
}

TEST(ConvertRaw, PermutesColumnsAndRenumbersFrames) {
  std::istringstream in("10 3 2.0 5.0\n");
  EXPECT_EQ(convert_raw(in, ColumnOrder::parse("frame,id,y,x"), 10), "1\t3\t5.0\t2.0\n");
}

TEST(ConvertRaw, FrameNotDivisibleByStride) {
  std::istringstream in("15 3 2.0 5.0\n");
  EXPECT_THROW(convert_raw(in, ColumnOrder::parse("frame,id,x,y"), 10), DataError);
}

TEST(ConvertRaw, NonNumericField) {
  std::istringstream in("10 3 two 5.0\n");
  EXPECT_THROW(convert_raw(in, ColumnOrder::parse("frame,id,x,y"), 10), DataError);
}

TEST(ConvertRaw, ThreeRowsMatchHandConversion) {
  // ETH-style layout: frame, id, x, _, y, with extra columns skipped.
  std::istringstream in(
      "780 1 8.46 0.0 3.59\n"
      "790 1 9.57 0.0 3.79\n"
      "790 2 -1.5e-1 0.0 +2.25\n");
  const std::string expected =
      "78\t1\t8.46\t3.59\n"
      "79\t1\t9.57\t3.79\n"
      "79\t2\t-1.5e-1\t2.25\n";
  EXPECT_EQ(convert_raw(in, ColumnOrder::parse("frame,id,x,_,y"), 10), expected);
}

TEST(ConvertRaw, SplitsPedestriansAtGaps) {
  std::istringstream in(
      "0 4 0 0\n1 4 1 0\n3 4 3 0\n4 4 4 0\n0 9 5 5\n");
  const TrajectorySet set = parse_canonical(convert_raw(in, ColumnOrder::parse("frame,id,x,y"), 1));
  std::set<PedId> ids;
  for (const auto& f : set.frames)
    for (const auto& e : f.entries) ids.insert(e.ped_id);
  EXPECT_EQ(ids, (std::set<PedId>{4, 9, 10}));
  EXPECT_EQ(set.frames.back().entries[0].ped_id, 10);
}

TEST(ColumnOrder, RejectsIncompleteSpec) {
  EXPECT_THROW(ColumnOrder::parse("frame,id,x"), UsageError);
  EXPECT_THROW(ColumnOrder::parse("frame,id,x,x"), UsageError);
  EXPECT_THROW(ColumnOrder::parse("frame,id,x,z"), UsageError);
}

TEST(Windows, CountsSlidingWindows) {
  EXPECT_EQ(window_sequences(dense_scene(20, 1), {8, 20, 1}).size(), 1u);
  EXPECT_EQ(window_sequences(dense_scene(21, 1), {8, 20, 1}).size(), 2u);
  EXPECT_TRUE(window_sequences(dense_scene(19, 1), {8, 20, 1}).empty());
  EXPECT_EQ(window_sequences(dense_scene(60, 1), {8, 20, 20}).size(), 3u);
}

TEST(Windows, KeepsLateEntrants) {
  std::string text;
  for (int f = 0; f < 20; ++f) {
    text += std::to_string(f) + "\t1\t" + std::to_string(0.1 * f) + "\t0.0\n";
    if (f >= 12) text += std::to_string(f) + "\t2\t" + std::to_string(0.1 * f) + "\t1.0\n";
  }
  const auto windows = window_sequences(parse_canonical(text), {8, 20, 1});
  ASSERT_EQ(windows.size(), 1u);
  EXPECT_EQ(windows[0].pedestrians(), (std::vector<PedId>{1, 2}));
  EXPECT_FALSE(windows[0].present(2, 11));
  EXPECT_TRUE(windows[0].present(2, 12));
  EXPECT_EQ(windows[0].position(2, 3), nullptr);
}

TEST(Windows, EveryWindowHasExactlyTotalFrames) {
  for (const auto& w : window_sequences(dense_scene(57, 3), {8, 20, 3})) {
    EXPECT_EQ(w.frames.size(), 20u);
  }
}

TEST(Windows, RejectsBadOptions) {
  EXPECT_THROW(window_sequences(dense_scene(20, 1), {20, 20, 1}), UsageError);
  EXPECT_THROW(window_sequences(dense_scene(20, 1), {8, 20, 0}), UsageError);
}

TEST(Splits, EightyTwentyOfOneHundred) {
  // Four scenes with 25 windows each, plus a held-out scene.
  std::vector<TrajectorySet> scenes;
  for (int s = 0; s < 5; ++s) scenes.push_back(dense_scene(s == 0 ? 100 : 500, 2, "scene" + std::to_string(s)));
  const DatasetSplits splits = leave_one_out_splits(scenes, 0, {8, 20, 20}, {8, 20, 20}, 7);
  EXPECT_EQ(splits.train.size(), 80u);
  EXPECT_EQ(splits.validation.size(), 20u);
  EXPECT_EQ(splits.test.size(), 5u);
  for (const auto& w : splits.test) EXPECT_EQ(w.scene_id, "scene0");
  for (const auto& w : splits.train) EXPECT_NE(w.scene_id, "scene0");
  std::set<std::string> train_ids, val_ids;
  for (const auto& w : splits.train) train_ids.insert(w.id());
  for (const auto& w : splits.validation) {
    EXPECT_EQ(train_ids.count(w.id()), 0u);
    EXPECT_NE(w.scene_id, "scene0");
  }
}

TEST(Splits, SameSeedSameSplit) {
  std::vector<TrajectorySet> scenes;
  for (int s = 0; s < 5; ++s) scenes.push_back(dense_scene(200, 2, "scene" + std::to_string(s)));
  const auto a = leave_one_out_splits(scenes, 2, {8, 20, 5}, {8, 20, 20}, 11);
  const auto b = leave_one_out_splits(scenes, 2, {8, 20, 5}, {8, 20, 20}, 11);
  const auto c = leave_one_out_splits(scenes, 2, {8, 20, 5}, {8, 20, 20}, 12);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.validation, b.validation);
  EXPECT_NE(a.train, c.train);
}

TEST(Splits, HeldOutIndexOutOfRange) {
  std::vector<TrajectorySet> scenes(5, dense_scene(40, 1));
  EXPECT_THROW(leave_one_out_splits(scenes, 5, {}, {}, 0), UsageError);
}

TEST(Synth, ConstantVelocityAdvancesByVelocityPerFrame) {
  const TrajectorySet set = constant_velocity_scene({{0.0, 0.0}}, {{1.0, 0.0}}, 20);
  for (std::size_t k = 0; k < 20; ++k) {
    EXPECT_EQ(set.frames[k].entries[0].position, (Vec2{static_cast<double>(k), 0.0}));
  }
}

TEST(Synth, RandomConstantVelocityIsStraight) {
  const TrajectorySet set = synth_scene(SceneKind::kConstantVelocity, 3, 20, 9);
  for (std::size_t p = 0; p < 3; ++p) {
    const Vec2 v = set.frames[1].entries[p].position - set.frames[0].entries[p].position;
    for (std::size_t k = 2; k < 20; ++k) {
      const Vec2 d = set.frames[k].entries[p].position - set.frames[k - 1].entries[p].position;
      EXPECT_NEAR(d.x, v.x, 1e-12);
      EXPECT_NEAR(d.y, v.y, 1e-12);
    }
  }
}

TEST(Synth, HeadOnSwapKeepsAgentsApart) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const TrajectorySet set = synth_scene(SceneKind::kHeadOnSwap, 2, 20, seed);
    double closest = 1e9;
    for (const auto& f : set.frames) {
      closest = std::min(closest, norm(f.entries[0].position - f.entries[1].position));
    }
    EXPECT_GT(closest, 0.3) << "seed " << seed;
  }
}

TEST(Synth, HeadOnSwapAgentsPassEachOther) {
  SynthOptions options;
  options.random_rotation = false;
  const TrajectorySet set = synth_scene(SceneKind::kHeadOnSwap, 2, 20, 3, options);
  const auto& first = set.frames.front().entries;
  const auto& last = set.frames.back().entries;
  EXPECT_LT(first[0].position.x, first[1].position.x);
  EXPECT_GT(last[0].position.x, last[1].position.x);
}

TEST(Synth, SameSeedSameScene) {
  EXPECT_EQ(synth_scene(SceneKind::kCrossing, 4, 30, 5), synth_scene(SceneKind::kCrossing, 4, 30, 5));
  EXPECT_NE(synth_scene(SceneKind::kCrossing, 4, 30, 5), synth_scene(SceneKind::kCrossing, 4, 30, 6));
}

TEST(Synth, UnknownKindAndOddPairs) {
  EXPECT_THROW(parse_scene_kind("spiral"), UsageError);
  EXPECT_THROW(synth_scene(SceneKind::kHeadOnSwap, 3, 20, 1), UsageError);
  EXPECT_EQ(parse_scene_kind("head_on_swap"), SceneKind::kHeadOnSwap);
}
