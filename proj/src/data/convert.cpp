#include "sattn/data/convert.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>

#include "sattn/data/trajectory.hpp"
#include "sattn/error.hpp"

namespace sattn::data {

ColumnOrder ColumnOrder::parse(std::string_view spec) {
  ColumnOrder order;
  std::optional<std::size_t> frame, id, x, y;
  std::size_t index = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = spec.find(',', start);
    const std::string_view name =
        spec.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    auto assign = [&](std::optional<std::size_t>& slot) {
      if (slot.has_value()) {
        throw UsageError("column spec '" + std::string(spec) + "' names '" + std::string(name) +
                         "' twice");
      }
      slot = index;
    };
    if (name == "frame") {
      assign(frame);
    } else if (name == "id") {
      assign(id);
    } else if (name == "x") {
      assign(x);
    } else if (name == "y") {
      assign(y);
    } else if (name != "_") {
      throw UsageError("column spec '" + std::string(spec) + "': unknown column '" +
                       std::string(name) + "' (expected frame, id, x, y or _)");
    }
    ++index;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (!frame || !id || !x || !y) {
    throw UsageError("column spec '" + std::string(spec) + "' must name frame, id, x and y");
  }
  order.width = index;
  order.frame = *frame;
  order.id = *id;
  order.x = *x;
  order.y = *y;
  return order;
}

namespace {

struct RawRow {
  FrameId frame;
  PedId id;
  std::string x;
  std::string y;
};

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_number(std::string_view token, std::size_t line_no) {
  double v = 0.0;
  const char* begin = token.data();
  if (!token.empty() && token.front() == '+') ++begin;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw DataError("line " + std::to_string(line_no) + ": non-numeric field '" +
                    std::string(token) + "'");
  }
  return v;
}

std::int64_t parse_integral(std::string_view token, std::size_t line_no, const char* what) {
  const double v = parse_number(token, line_no);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw DataError("line " + std::to_string(line_no) + ": " + what + " '" + std::string(token) +
                    "' is not an integer");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

std::string convert_raw(std::istream& in, const ColumnOrder& columns, std::int64_t frame_stride) {
  if (frame_stride <= 0) throw UsageError("frame stride must be positive");

  std::vector<RawRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto tokens = tokenize(line);
    if (tokens.size() != columns.width) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(columns.width) + " columns, got " +
                      std::to_string(tokens.size()));
    }
    const std::int64_t frame = parse_integral(tokens[columns.frame], line_no, "frame id");
    if (frame % frame_stride != 0) {
      throw DataError("line " + std::to_string(line_no) + ": frame " + std::to_string(frame) +
                      " is not divisible by stride " + std::to_string(frame_stride));
    }
    const PedId id = parse_integral(tokens[columns.id], line_no, "pedestrian id");
    parse_number(tokens[columns.x], line_no);
    parse_number(tokens[columns.y], line_no);
    auto verbatim = [](std::string_view t) {
      return std::string(!t.empty() && t.front() == '+' ? t.substr(1) : t);
    };
    rows.push_back({frame / frame_stride, id, verbatim(tokens[columns.x]),
                    verbatim(tokens[columns.y])});
  }
  if (rows.empty()) throw DataError("no observations");

  // Group per pedestrian, then split at frame gaps.
  std::map<PedId, std::map<FrameId, std::size_t>> by_ped;
  PedId max_id = rows.front().id;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    max_id = std::max(max_id, rows[i].id);
    if (!by_ped[rows[i].id].emplace(rows[i].frame, i).second) {
      throw DataError("duplicate observation of ped " + std::to_string(rows[i].id) + " in frame " +
                      std::to_string(rows[i].frame));
    }
  }
  PedId next_id = max_id + 1;
  std::map<FrameId, std::map<PedId, std::size_t>> output;
  for (const auto& [ped, frames] : by_ped) {
    PedId current = ped;
    std::optional<FrameId> previous;
    for (const auto& [frame, row] : frames) {
      if (previous.has_value() && frame != *previous + 1) current = next_id++;
      output[frame].emplace(current, row);
      previous = frame;
    }
  }

  std::string out;
  for (const auto& [frame, peds] : output) {
    for (const auto& [ped, row] : peds) {
      out += std::to_string(frame);
      out += '\t';
      out += std::to_string(ped);
      out += '\t';
      out += rows[row].x;
      out += '\t';
      out += rows[row].y;
      out += '\n';
    }
  }
  return out;
}

}  // namespace sattn::data
