#include "sattn/data/synth.hpp"

#include <cmath>
#include <numbers>

#include "sattn/error.hpp"
#include "sattn/rng.hpp"

namespace sattn::data {

SceneKind parse_scene_kind(std::string_view name) {
  if (name == "constant_velocity") return SceneKind::kConstantVelocity;
  if (name == "head_on_swap") return SceneKind::kHeadOnSwap;
  if (name == "crossing") return SceneKind::kCrossing;
  throw UsageError("unknown scene kind '" + std::string(name) +
                   "' (expected constant_velocity, head_on_swap or crossing)");
}

const char* to_string(SceneKind kind) noexcept {
  switch (kind) {
    case SceneKind::kConstantVelocity: return "constant_velocity";
    case SceneKind::kHeadOnSwap: return "head_on_swap";
    case SceneKind::kCrossing: return "crossing";
  }
  return "unknown";
}

namespace {

Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

TrajectorySet from_tracks(const std::vector<std::vector<Vec2>>& tracks, std::size_t n_frames,
                          std::string scene_id) {
  TrajectorySet set;
  set.scene_id = std::move(scene_id);
  for (std::size_t k = 0; k < n_frames; ++k) {
    FrameObservation f;
    f.frame_id = static_cast<FrameId>(k);
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      f.entries.push_back({static_cast<PedId>(i + 1), tracks[i][k]});
    }
    set.frames.push_back(std::move(f));
  }
  return set;
}

double bump(double t, double center, double width) {
  const double u = (t - center) / width;
  return std::exp(-u * u);
}

// One interacting pair in its local frame, then rotated and placed.
void pair_tracks(SceneKind kind, std::size_t n_frames, CounterRng& rng, double angle,
                 Vec2 offset, std::vector<Vec2>& a, std::vector<Vec2>& b) {
  const double last = static_cast<double>(n_frames - 1);
  const double meet = rng.uniform(0.5, 0.75) * last;
  const double speed_a = rng.uniform(0.25, 0.4);
  const double speed_b = rng.uniform(0.25, 0.4);
  const double amplitude = rng.uniform(0.35, 0.6);
  const double width = rng.uniform(2.5, 4.0);
  a.resize(n_frames);
  b.resize(n_frames);
  for (std::size_t k = 0; k < n_frames; ++k) {
    const double t = static_cast<double>(k);
    const double lateral = amplitude * bump(t, meet, width);
    Vec2 pa, pb;
    if (kind == SceneKind::kHeadOnSwap) {
      // a walks +x, b walks -x; each steps to its own right.
      pa = {speed_a * (t - meet), -lateral};
      pb = {-speed_b * (t - meet), lateral};
    } else {
      // a walks +x, b walks +y; a swerves to -y, b to +x.
      pa = {speed_a * (t - meet), -lateral};
      pb = {lateral, speed_b * (t - meet)};
    }
    a[k] = rotate(pa, angle) + offset;
    b[k] = rotate(pb, angle) + offset;
  }
}

}  // namespace

TrajectorySet constant_velocity_scene(const std::vector<Vec2>& starts,
                                      const std::vector<Vec2>& velocities, std::size_t n_frames,
                                      std::string scene_id) {
  if (starts.size() != velocities.size()) {
    throw UsageError("constant_velocity_scene: starts and velocities differ in length");
  }
  std::vector<std::vector<Vec2>> tracks(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    for (std::size_t k = 0; k < n_frames; ++k) {
      tracks[i].push_back(starts[i] + static_cast<double>(k) * velocities[i]);
    }
  }
  return from_tracks(tracks, n_frames, std::move(scene_id));
}

TrajectorySet synth_scene(SceneKind kind, std::size_t n_peds, std::size_t n_frames,
                          std::uint64_t seed, const SynthOptions& options) {
  if (n_peds == 0) throw UsageError("synth: need at least one pedestrian");
  if (n_frames < 2) throw UsageError("synth: need at least two frames");
  CounterRng rng(derive_seed(seed, std::string("synth/") + to_string(kind)));
  const std::string scene_id = std::string(to_string(kind)) + "_" + std::to_string(seed);

  if (kind == SceneKind::kConstantVelocity) {
    std::vector<Vec2> starts, velocities;
    for (std::size_t i = 0; i < n_peds; ++i) {
      starts.push_back({rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)});
      const double speed = rng.uniform(0.15, 0.45);
      const double heading = options.random_rotation ? rng.uniform(0.0, 2.0 * std::numbers::pi) : 0.0;
      velocities.push_back({speed * std::cos(heading), speed * std::sin(heading)});
    }
    return constant_velocity_scene(starts, velocities, n_frames, scene_id);
  }

  if (n_peds % 2 != 0) {
    throw UsageError(std::string("synth: ") + to_string(kind) + " needs an even pedestrian count");
  }
  std::vector<std::vector<Vec2>> tracks(n_peds);
  for (std::size_t p = 0; p < n_peds / 2; ++p) {
    const double angle = options.random_rotation ? rng.uniform(0.0, 2.0 * std::numbers::pi) : 0.0;
    const Vec2 offset{rng.uniform(-1.0, 1.0), 8.0 * static_cast<double>(p) + rng.uniform(-1.0, 1.0)};
    pair_tracks(kind, n_frames, rng, angle, offset, tracks[2 * p], tracks[2 * p + 1]);
  }
  return from_tracks(tracks, n_frames, scene_id);
}

}  // namespace sattn::data
