#include "dlcot/span.hpp"

#include <algorithm>

namespace dlcot {

CoverageReport validate_coverage(std::size_t text_size, std::vector<Span> spans) {
  CoverageReport report;
  for (auto it = spans.begin(); it != spans.end();) {
    if (it->end > text_size || it->begin > text_size) {
      report.out_of_range.push_back(*it);
      it = spans.erase(it);
    } else {
      ++it;
    }
  }
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
    return a.begin < b.begin || (a.begin == b.begin && a.end < b.end);
  });

  std::size_t cursor = 0;
  for (const Span& s : spans) {
    if (s.begin > cursor) {
      report.gaps.push_back(Span{cursor, s.begin});
    } else if (s.begin < cursor) {
      report.overlaps.push_back(Span{s.begin, std::min(cursor, s.end)});
    }
    cursor = std::max(cursor, s.end);
  }
  if (cursor < text_size) {
    report.gaps.push_back(Span{cursor, text_size});
  }
  report.pass = report.gaps.empty() && report.overlaps.empty() &&
                report.out_of_range.empty();
  return report;
}

std::vector<Span> merge_spans(std::vector<Span> spans) {
  spans.erase(std::remove_if(spans.begin(), spans.end(),
                             [](const Span& s) { return s.empty(); }),
              spans.end());
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
    return a.begin < b.begin || (a.begin == b.begin && a.end < b.end);
  });
  std::vector<Span> merged;
  for (const Span& s : spans) {
    if (!merged.empty() && s.begin <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, s.end);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

std::vector<Span> complement_spans(std::size_t text_size, std::vector<Span> spans) {
  std::vector<Span> kept;
  std::size_t cursor = 0;
  for (const Span& s : merge_spans(std::move(spans))) {
    if (s.begin > cursor) kept.push_back(Span{cursor, s.begin});
    cursor = std::max(cursor, std::min(s.end, text_size));
  }
  if (cursor < text_size) kept.push_back(Span{cursor, text_size});
  return kept;
}

}  // namespace dlcot
