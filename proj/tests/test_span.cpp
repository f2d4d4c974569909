#include "doctest.h"
#include "dlcot/span.hpp"

#include <random>

using namespace dlcot;

TEST_CASE("validate_coverage passes on an exact tiling") {
  const auto report = validate_coverage(10, {{0, 4}, {4, 7}, {7, 10}});
  CHECK(report.pass);
  CHECK(report.gaps.empty());
  CHECK(report.overlaps.empty());
}

TEST_CASE("validate_coverage locates a one-byte gap") {
  const auto report = validate_coverage(10, {{0, 4}, {5, 10}});
  CHECK_FALSE(report.pass);
  REQUIRE(report.gaps.size() == 1);
  CHECK(report.gaps[0] == Span{4, 5});
}

TEST_CASE("validate_coverage locates overlaps and out-of-range spans") {
  const auto overlapping = validate_coverage(10, {{0, 6}, {4, 10}});
  CHECK_FALSE(overlapping.pass);
  REQUIRE(overlapping.overlaps.size() == 1);
  CHECK(overlapping.overlaps[0] == Span{4, 6});

  const auto outside = validate_coverage(10, {{0, 10}, {9, 12}});
  CHECK_FALSE(outside.pass);
  CHECK(outside.out_of_range.size() == 1);
}

TEST_CASE("validate_coverage accepts spans in any order") {
  CHECK(validate_coverage(9, {{6, 9}, {0, 3}, {3, 6}}).pass);
}

TEST_CASE("merge and complement partition the text") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 100;
    std::vector<Span> removed;
    const int count = static_cast<int>(rng() % 5);
    for (int i = 0; i < count; ++i) {
      const std::size_t a = rng() % (n + 1);
      const std::size_t b = rng() % (n + 1);
      removed.push_back(Span{std::min(a, b), std::max(a, b)});
    }
    auto kept = complement_spans(n, removed);
    auto merged = merge_spans(removed);
    // kept + merged removed must tile [0, n)
    std::vector<Span> all = kept;
    all.insert(all.end(), merged.begin(), merged.end());
    CHECK(validate_coverage(n, all).pass);
  }
}
