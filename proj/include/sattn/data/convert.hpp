#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace sattn::data {

// Position of each canonical field within a raw row. Raw files may carry
// extra columns; those are named `_` in the spec string and skipped.
struct ColumnOrder {
  std::size_t width = 4;
  std::size_t frame = 0;
  std::size_t id = 1;
  std::size_t x = 2;
  std::size_t y = 3;

  // Parses "frame,id,x,y"-style permutations, e.g. "frame,id,y,x" or
  // "frame,id,x,_,y". Every one of frame/id/x/y must appear exactly once.
  static ColumnOrder parse(std::string_view spec);
};

// Converts a whitespace- (or comma-) separated numeric annotation file into
// canonical text. Frame ids are divided by `frame_stride`; coordinate tokens
// are copied verbatim. A pedestrian whose renumbered frames have gaps is split
// into separate ids: later segments get fresh ids above the largest id in the
// file, in order of (original id, segment start).
std::string convert_raw(std::istream& in, const ColumnOrder& columns, std::int64_t frame_stride);

}  // namespace sattn::data
