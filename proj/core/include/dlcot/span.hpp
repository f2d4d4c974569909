#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dlcot {

/// Half-open byte range [begin, end) into some original text. All parsed
/// structure in the pipeline is expressed as spans into the unmodified
/// source trace; no stage ever stores text the original does not contain.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }

  std::string_view slice(std::string_view text) const {
    return text.substr(begin, end - begin);
  }

  bool operator==(const Span&) const = default;
};

struct CoverageReport {
  bool pass = false;
  std::vector<Span> gaps;      // bytes covered by no span
  std::vector<Span> overlaps;  // bytes covered by more than one span
  std::vector<Span> out_of_range;
};

/// Checks that `spans` tile [0, text_size) exactly: no gaps, no overlaps,
/// nothing out of range. Spans may be given in any order.
CoverageReport validate_coverage(std::size_t text_size, std::vector<Span> spans);

/// Merges overlapping or touching spans into a minimal sorted set.
std::vector<Span> merge_spans(std::vector<Span> spans);

/// Sorted complement of `spans` within [0, text_size).
std::vector<Span> complement_spans(std::size_t text_size, std::vector<Span> spans);

}  // namespace dlcot
