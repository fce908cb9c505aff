#include "sattn/data/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "sattn/error.hpp"

namespace sattn::data {

double norm(Vec2 v) noexcept { return std::hypot(v.x, v.y); }

void TrajectorySet::validate() const {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const FrameObservation& f = frames[i];
    if (i > 0 && f.frame_id <= frames[i - 1].frame_id) {
      throw DataError("scene '" + scene_id + "': frame ids not strictly increasing at frame " +
                      std::to_string(f.frame_id));
    }
    for (std::size_t k = 0; k < f.entries.size(); ++k) {
      const Observation& o = f.entries[k];
      if (!std::isfinite(o.position.x) || !std::isfinite(o.position.y)) {
        throw DataError("scene '" + scene_id + "': non-finite position for ped " +
                        std::to_string(o.ped_id) + " at frame " + std::to_string(f.frame_id));
      }
      if (k > 0 && o.ped_id <= f.entries[k - 1].ped_id) {
        throw DataError("scene '" + scene_id + "': duplicate or unsorted ped " +
                        std::to_string(o.ped_id) + " at frame " + std::to_string(f.frame_id));
      }
    }
  }
}

std::size_t TrajectorySet::observation_count() const noexcept {
  std::size_t n = 0;
  for (const auto& f : frames) n += f.entries.size();
  return n;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos
                                                                    : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

template <class T>
bool parse_full(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

TrajectorySet parse_canonical(std::istream& in, std::string scene_id) {
  std::map<FrameId, std::map<PedId, Vec2>> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    const auto fields = split_tabs(line);
    FrameId frame = 0;
    PedId ped = 0;
    double x = 0.0, y = 0.0;
    if (fields.size() != 4 || !parse_full(fields[0], frame) || !parse_full(fields[1], ped) ||
        !parse_full(fields[2], x) || !parse_full(fields[3], y)) {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected frame_id<TAB>ped_id<TAB>x<TAB>y, got '" + line + "'");
    }
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw DataError("line " + std::to_string(line_no) + ": non-finite coordinate");
    }
    auto [it, inserted] = frames[frame].emplace(ped, Vec2{x, y});
    if (!inserted) {
      throw DataError("line " + std::to_string(line_no) + ": duplicate observation of ped " +
                      std::to_string(ped) + " in frame " + std::to_string(frame));
    }
  }
  if (frames.empty()) throw DataError("no observations");

  TrajectorySet set;
  set.scene_id = std::move(scene_id);
  for (const auto& [frame, peds] : frames) {
    FrameObservation fo;
    fo.frame_id = frame;
    for (const auto& [ped, pos] : peds) fo.entries.push_back({ped, pos});
    set.frames.push_back(std::move(fo));
  }
  return set;
}

TrajectorySet parse_canonical(std::string_view text, std::string scene_id) {
  std::istringstream in{std::string(text)};
  return parse_canonical(in, std::move(scene_id));
}

TrajectorySet load_canonical(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse_canonical(in, path.stem().string());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string serialize(const TrajectorySet& set) {
  std::string out;
  for (const auto& f : set.frames) {
    for (const auto& o : f.entries) {
      out += std::to_string(f.frame_id);
      out += '\t';
      out += std::to_string(o.ped_id);
      out += '\t';
      out += format_number(o.position.x);
      out += '\t';
      out += format_number(o.position.y);
      out += '\n';
    }
  }
  return out;
}

void save_canonical(const std::filesystem::path& path, const TrajectorySet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize(set);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace sattn::data
