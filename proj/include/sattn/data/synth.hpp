#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sattn/data/trajectory.hpp"

namespace sattn::data {

enum class SceneKind { kConstantVelocity, kHeadOnSwap, kCrossing };

SceneKind parse_scene_kind(std::string_view name);  // throws UsageError
const char* to_string(SceneKind kind) noexcept;

struct SynthOptions {
  // Rotate each pedestrian pair (or each walker) by a random heading. Without
  // it, head-on and crossing pairs travel along the world x/y axes.
  bool random_rotation = true;
};

// Deterministic synthetic crowd scene with frame ids 0..n_frames-1 and ped ids
// 1..n_peds (positions in meters, one frame per 0.4 s step).
//
//   constant_velocity  straight lines at a fixed per-pedestrian velocity
//                      (0.15-0.45 m per frame, random heading)
//   head_on_swap       pairs approach along a line and both step to their
//                      right with a Gaussian-shaped lateral offset (0.35-0.6 m
//                      peak) centred on the closest approach, which falls in
//                      the second half of the scene
//   crossing           pairs on perpendicular paths through a common point;
//                      both swerve with a timed offset around the crossing
//
// Pair kinds need an even n_peds; pairs are laid out 8 m apart.
TrajectorySet synth_scene(SceneKind kind, std::size_t n_peds, std::size_t n_frames,
                          std::uint64_t seed, const SynthOptions& options = {});

// Pedestrian i (id i+1) at frame k sits at starts[i] + k * velocities[i],
// velocities in meters per frame.
TrajectorySet constant_velocity_scene(const std::vector<Vec2>& starts,
                                      const std::vector<Vec2>& velocities,
                                      std::size_t n_frames, std::string scene_id = "synthetic");

}  // namespace sattn::data
