#include "doctest.h"
#include "dlcot/errors.hpp"
#include "dlcot/metrics.hpp"
#include "temp_dir.hpp"

#include <fstream>

using namespace dlcot;
using dlcot::test::TempDir;

namespace {

RecordMetrics base_metrics(const std::string& id, const std::string& strategy,
                           std::size_t tokens_original, std::size_t tokens_optimized) {
  RecordMetrics m;
  m.record_id = id;
  m.strategy = strategy;
  m.source = "synthetic";
  m.tokens_original = tokens_original;
  m.tokens_optimized = tokens_optimized;
  m.approach_count = 2;
  m.verification_count = 1;
  m.try_count = 3;
  m.cluster_count = 3;
  m.slope = 1.0;
  return m;
}

}  // namespace

TEST_CASE("try count is the sum of approach and verification counts") {
  CoTRecord record;
  record.id = "m1";
  record.solution_text = "text";

  MacroSegments segments;
  ApproachTree tree;
  tree.approaches.resize(2);
  tree.approaches[0].index = 1;
  tree.approaches[1].index = 2;
  VerificationSet verifications;
  verifications.items.resize(1);

  ClusterAssignment approach_clusters;
  approach_clusters.cluster_of = {0, 0};
  approach_clusters.clusters = {{0, 1}};
  ClusterAssignment verification_clusters;
  verification_clusters.cluster_of = {0};
  verification_clusters.clusters = {{0}};

  const RecordMetrics m =
      compute_metrics(record, segments, tree, verifications, approach_clusters,
                      verification_clusters, "shorter", "multiall", Tokenizer{});
  CHECK(m.try_count == 3);
  CHECK(m.approach_count == 2);
  CHECK(m.verification_count == 1);
  CHECK(m.cluster_count == 2);  // 1 approach cluster + 1 verification cluster
  CHECK(m.slope == doctest::Approx(1.5));
}

TEST_CASE("single approach in a single cluster has slope 1") {
  CoTRecord record;
  record.id = "m2";
  record.solution_text = "text";
  ApproachTree tree;
  tree.approaches.resize(1);
  tree.approaches[0].index = 1;
  ClusterAssignment approach_clusters;
  approach_clusters.cluster_of = {0};
  approach_clusters.clusters = {{0}};

  const RecordMetrics m =
      compute_metrics(record, MacroSegments{}, tree, VerificationSet{},
                      approach_clusters, ClusterAssignment{}, "t", "multi1",
                      Tokenizer{});
  CHECK(m.try_count == 1);
  CHECK(m.cluster_count == 1);
  CHECK(m.slope == doctest::Approx(1.0));
}

TEST_CASE("stage distribution mirrors section character shares") {
  // 2 + 38 + 849 + 67 + 44 = 1000 characters
  const std::string text = std::string(2, 'q') + std::string(38, 'u') +
                           std::string(849, 'a') + std::string(67, 'v') +
                           std::string(44, 'c');
  CoTRecord record;
  record.id = "dist";
  record.solution_text = text;

  MacroSegments segments;
  segments.entries = {
      {MacroSection::question_repeat, Span{0, 2}},
      {MacroSection::problem_understand, Span{2, 40}},
      {MacroSection::approach_explore, Span{40, 889}},
      {MacroSection::verify, Span{889, 956}},
      {MacroSection::conclusion, Span{956, 1000}},
  };

  ApproachTree tree;
  tree.approaches.resize(1);
  tree.approaches[0].index = 1;
  ClusterAssignment approach_clusters;
  approach_clusters.cluster_of = {0};
  approach_clusters.clusters = {{0}};

  const RecordMetrics m =
      compute_metrics(record, segments, tree, VerificationSet{}, approach_clusters,
                      ClusterAssignment{}, text, "multiall", Tokenizer{});

  CHECK(m.stage_distribution.at("Question_Repeat") == doctest::Approx(0.002));
  CHECK(m.stage_distribution.at("Problem_Understand") == doctest::Approx(0.038));
  CHECK(m.stage_distribution.at("Approach_Explore") == doctest::Approx(0.849));
  CHECK(m.stage_distribution.at("Verify") == doctest::Approx(0.067));
  CHECK(m.stage_distribution.at("Conclusion") == doctest::Approx(0.044));

  double sum = 0.0;
  for (const auto& [name, share] : m.stage_distribution) sum += share;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("metric identity violations throw") {
  RecordMetrics bad = base_metrics("x", "multiall", 100, 50);
  bad.try_count = 4;  // != 2 + 1
  CHECK_THROWS_AS(bad.validate(), RecordError);

  RecordMetrics bad_slope = base_metrics("x", "multiall", 100, 50);
  bad_slope.slope = 2.0;
  CHECK_THROWS_AS(bad_slope.validate(), RecordError);

  RecordMetrics zero_clusters = base_metrics("x", "multiall", 100, 50);
  zero_clusters.cluster_count = 0;
  CHECK_THROWS_AS(zero_clusters.validate(), RecordError);
}

TEST_CASE("aggregate of a single record equals that record") {
  const auto report = aggregate({base_metrics("only", "multiall", 200, 150)},
                                GroupBy::strategy);
  REQUIRE(report.groups.count("multiall") == 1);
  const GroupStats& stats = report.groups.at("multiall");
  CHECK(stats.records == 1);
  CHECK(stats.tokens_original == doctest::Approx(200));
  CHECK(stats.tokens_optimized == doctest::Approx(150));
  CHECK(stats.token_reduction == doctest::Approx(0.25));
}

TEST_CASE("two equal-sized records with 10% and 30% reductions aggregate to 20%") {
  const auto report = aggregate({base_metrics("a", "multiall", 1000, 900),
                                 base_metrics("b", "multiall", 1000, 700)},
                                GroupBy::strategy);
  CHECK(report.groups.at("multiall").token_reduction == doctest::Approx(0.20));
}

TEST_CASE("aggregate is permutation invariant") {
  const std::vector<RecordMetrics> forward = {
      base_metrics("a", "multi1", 100, 90), base_metrics("b", "multi1", 300, 200),
      base_metrics("c", "multiall", 50, 20)};
  std::vector<RecordMetrics> backward(forward.rbegin(), forward.rend());

  const auto r1 = aggregate(forward, GroupBy::strategy);
  const auto r2 = aggregate(backward, GroupBy::strategy);
  CHECK(r1.to_json() == r2.to_json());
}

TEST_CASE("aggregate groups by source and difficulty, omitting empty keys") {
  auto a = base_metrics("a", "multiall", 100, 80);
  a.source = "set1";
  auto b = base_metrics("b", "multiall", 100, 60);
  b.source = "";
  const auto by_source = aggregate({a, b}, GroupBy::source);
  CHECK(by_source.groups.size() == 1);
  CHECK(by_source.groups.count("set1") == 1);

  auto c = base_metrics("c", "multiall", 100, 80);
  c.difficulty = 3;
  const auto by_difficulty = aggregate({c}, GroupBy::difficulty);
  CHECK(by_difficulty.groups.count("3") == 1);
}

TEST_CASE("aggregate rejects an empty metrics stream") {
  CHECK_THROWS_AS(aggregate({}, GroupBy::strategy), RecordError);
}

TEST_CASE("report files are written with the documented columns") {
  TempDir dir;
  const auto report = aggregate({base_metrics("a", "multiall", 100, 50),
                                 base_metrics("b", "multi1", 100, 95)},
                                GroupBy::strategy);
  write_report_files(report, dir.path);

  std::ifstream slope(dir / "slope.csv");
  std::string header;
  std::getline(slope, header);
  CHECK(header == "strategy,cluster_count,try_count,slope");

  std::ifstream tokens(dir / "tokens.csv");
  std::getline(tokens, header);
  CHECK(header == "strategy,tokens_original,tokens_optimized,token_reduction");

  std::ifstream json_in(dir / "report.json");
  nlohmann::json j;
  json_in >> j;
  CHECK(j["records"] == 2);
  CHECK(j["groups"].contains("multiall"));
}

TEST_CASE("duplicated approaches lose at least half the approach tokens") {
  // A record with k=3 copies of the same approach: multiall keeps one copy,
  // so the approach section sheds exactly 2/3 of its tokens; analytically
  // any k >= 2 sheds at least half when (k-1)/k >= 1/2.
  const std::string approach =
      "Route text computes the value step by step until boxed. ";
  const std::string other = "intro text ";
  const Tokenizer tokenizer;
  const std::size_t approach_tokens = tokenizer.count(approach);
  const std::size_t kept = tokenizer.count(other) + approach_tokens;
  const std::size_t original = tokenizer.count(other) + 3 * approach_tokens;
  CHECK(original - kept >= 2 * approach_tokens);
  CHECK((original - kept) * 2 >= (3 * approach_tokens));  // >= 50% of approach tokens
}
