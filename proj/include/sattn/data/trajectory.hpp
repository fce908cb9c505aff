#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace sattn::data {

using PedId = std::int64_t;
using FrameId = std::int64_t;

// Annotation spacing of the canonical format.
inline constexpr double kFrameIntervalSeconds = 0.4;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
double norm(Vec2 v) noexcept;

struct Observation {
  PedId ped_id = 0;
  Vec2 position;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct FrameObservation {
  FrameId frame_id = 0;
  std::vector<Observation> entries;  // sorted by ped_id

  friend bool operator==(const FrameObservation&, const FrameObservation&) = default;
};

// World-coordinate (meter) pedestrian positions of one scene, one entry per
// annotated frame.
struct TrajectorySet {
  std::string scene_id;
  std::vector<FrameObservation> frames;

  // Throws DataError unless frame ids strictly increase, ped ids are unique
  // per frame and every position is finite.
  void validate() const;
  std::size_t observation_count() const noexcept;

  friend bool operator==(const TrajectorySet&, const TrajectorySet&) = default;
};

// Canonical text: `frame_id<TAB>ped_id<TAB>x<TAB>y` per line, `#` starts a
// comment line, blank lines are ignored. Frames are sorted by id and entries
// by pedestrian id.
TrajectorySet parse_canonical(std::istream& in, std::string scene_id = "");
TrajectorySet parse_canonical(std::string_view text, std::string scene_id = "");
TrajectorySet load_canonical(const std::filesystem::path& path);

std::string serialize(const TrajectorySet& set);
void save_canonical(const std::filesystem::path& path, const TrajectorySet& set);

// Shortest decimal text that parses back to the same double; integral
// values keep a trailing ".0".
std::string format_number(double value);

}  // namespace sattn::data
