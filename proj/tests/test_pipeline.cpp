#include "doctest.h"
#include "dlcot/errors.hpp"
#include "dlcot/pipeline.hpp"
#include "fakes.hpp"
#include "temp_dir.hpp"
#include "trace_fixture.hpp"

#include <fstream>
#include <random>

using namespace dlcot;
using namespace dlcot::test;

namespace {

struct PipelineFixture {
  TempDir dir;
  std::vector<TraceSpec> traces;
  PipelineConfig config;

  explicit PipelineFixture(int records = 3, unsigned seed = 77) {
    std::mt19937 rng(seed);
    for (int i = 0; i < records; ++i) {
      SyntheticOptions options;
      options.duplicates = 1 + static_cast<int>(rng() % 2);
      options.duplicate_verifications = 1;
      traces.push_back(make_synthetic_trace(rng, options, "rec-" + std::to_string(i)));
    }
    write_corpus(dir / "corpus.jsonl", traces);

    config.input = dir / "corpus.jsonl";
    config.output_dir = dir / "out";
    config.cache_dir = dir / "cache";
    config.offline = true;
    config.concurrency = 2;
  }

  void seed(Pipeline& pipeline) const {
    for (const TraceSpec& trace : traces) trace.seed_fixtures(pipeline.gateway());
  }
};

}  // namespace

TEST_CASE("offline pipeline runs end to end over a synthetic corpus") {
  PipelineFixture fixture;
  Pipeline pipeline(fixture.config);
  fixture.seed(pipeline);

  Diagnostics diag;
  const auto summaries = pipeline.run_all(diag);
  REQUIRE(summaries.size() == 5);
  for (const auto& summary : summaries) {
    CAPTURE(summary.stage);
    CHECK(summary.failed == 0);
    CHECK(summary.total() == fixture.traces.size());
  }

  // Final corpus: one line per record, documented schema.
  std::ifstream in(pipeline.final_corpus_path());
  REQUIRE(in.is_open());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("id"));
    CHECK(j.contains("question"));
    CHECK(j.contains("optimized_solution"));
    CHECK(j["strategy"] == "multiall");
    CHECK(j["token_counts"].contains("original"));
    CHECK(j["token_counts"].contains("optimized"));
    CHECK(j["token_counts"]["optimized"].get<std::size_t>() <=
          j["token_counts"]["original"].get<std::size_t>());
    ++lines;
  }
  CHECK(lines == fixture.traces.size());

  // Report files exist.
  CHECK(std::filesystem::exists(fixture.config.output_dir / "report" / "report.json"));
  CHECK(std::filesystem::exists(fixture.config.output_dir / "report" / "slope.csv"));
  CHECK(std::filesystem::exists(fixture.config.output_dir / "report" / "tokens.csv"));
}

TEST_CASE("re-running a completed stage skips every record") {
  PipelineFixture fixture;
  Pipeline pipeline(fixture.config);
  fixture.seed(pipeline);

  Diagnostics diag;
  const auto first = pipeline.run_segment(diag);
  CHECK(first.processed == fixture.traces.size());
  CHECK(first.skipped == 0);

  const auto second = pipeline.run_segment(diag);
  CHECK(second.processed == 0);
  CHECK(second.skipped == fixture.traces.size());
}

TEST_CASE("resume points are monotone across stages") {
  PipelineFixture fixture;
  Pipeline pipeline(fixture.config);
  fixture.seed(pipeline);

  Diagnostics diag;
  pipeline.run_segment(diag);
  pipeline.run_parse(diag);
  pipeline.run_analyze(diag);

  const auto segmented = pipeline.store().resume_point(Stage::segmented, diag);
  const auto parsed = pipeline.store().resume_point(Stage::parsed, diag);
  const auto analyzed = pipeline.store().resume_point(Stage::analyzed, diag);
  for (const auto& id : analyzed) CHECK(parsed.count(id) == 1);
  for (const auto& id : parsed) CHECK(segmented.count(id) == 1);
}

TEST_CASE("strategies keep separate artifact sets") {
  PipelineFixture fixture;
  {
    Pipeline pipeline(fixture.config);
    fixture.seed(pipeline);
    Diagnostics diag;
    pipeline.run_segment(diag);
    pipeline.run_parse(diag);
    pipeline.run_analyze(diag);
    pipeline.run_optimize(diag);
    pipeline.run_rewrite(diag);
  }
  {
    PipelineConfig config = fixture.config;
    config.strategy = Strategy::multi1;
    Pipeline pipeline(config);
    Diagnostics diag;
    pipeline.run_optimize(diag);
    pipeline.run_rewrite(diag);

    CHECK(std::filesystem::exists(config.output_dir / "artifacts" /
                                  "optimized-multiall"));
    CHECK(std::filesystem::exists(config.output_dir / "artifacts" /
                                  "optimized-multi1"));
    CHECK(std::filesystem::exists(config.output_dir / "corpus-multiall.jsonl"));
    CHECK(std::filesystem::exists(config.output_dir / "corpus-multi1.jsonl"));

    // multi1 removes at most one approach; multiall prunes strictly more
    // tokens on these redundant fixtures.
    const auto report = pipeline.run_report(diag);
    REQUIRE(report.groups.count("multi1") == 1);
    REQUIRE(report.groups.count("multiall") == 1);
    CHECK(report.groups.at("multiall").tokens_optimized <=
          report.groups.at("multi1").tokens_optimized);
  }
}

TEST_CASE("per-record failures are isolated and counted") {
  PipelineFixture fixture;
  Pipeline pipeline(fixture.config);
  // Seed all but the last record: its macro fixture is missing, which in
  // offline mode is fatal, so seed a BROKEN echo instead to exercise the
  // per-record failure path.
  for (std::size_t i = 0; i < fixture.traces.size(); ++i) {
    if (i + 1 < fixture.traces.size()) {
      fixture.traces[i].seed_fixtures(pipeline.gateway());
    } else {
      pipeline.gateway().put_fixture(macro_request(fixture.traces[i].record()),
                                     "not a macro split at all");
    }
  }

  Diagnostics diag;
  const auto summary = pipeline.run_segment(diag);
  CHECK(summary.processed == fixture.traces.size() - 1);
  CHECK(summary.failed == 1);
  CHECK(summary.total() == fixture.traces.size());

  // Later stages skip the failed record as missing-artifact failures.
  const auto parse_summary = pipeline.run_parse(diag);
  CHECK(parse_summary.failed == 1);
  CHECK(parse_summary.processed == fixture.traces.size() - 1);
}

TEST_CASE("strict mode escalates per-record failures") {
  PipelineFixture fixture;
  fixture.config.strict = true;
  Pipeline pipeline(fixture.config);
  pipeline.gateway().put_fixture(macro_request(fixture.traces[0].record()),
                                 "broken echo");
  for (std::size_t i = 1; i < fixture.traces.size(); ++i) {
    fixture.traces[i].seed_fixtures(pipeline.gateway());
  }

  Diagnostics diag;
  CHECK_THROWS_AS(pipeline.run_segment(diag), FatalError);
}

TEST_CASE("verify-answers keeps equivalent records and rejects the rest") {
  TempDir dir;
  std::mt19937 rng(5);
  std::vector<TraceSpec> traces;

  TraceSpec good = make_synthetic_trace(rng, SyntheticOptions{}, "good");
  TraceSpec wrong = make_synthetic_trace(rng, SyntheticOptions{}, "wrong");
  wrong.gold_answer = "43";  // conclusion still boxes 42
  TraceSpec symbolic = make_synthetic_trace(rng, SyntheticOptions{}, "symbolic");
  symbolic.gold_answer = "x + y";  // undecidable vs 42
  traces = {good, wrong, symbolic};
  write_corpus(dir / "corpus.jsonl", traces);

  PipelineConfig config;
  config.input = dir / "corpus.jsonl";
  config.output_dir = dir / "out";
  config.offline = true;
  Pipeline pipeline(config);

  Diagnostics diag;
  const auto summary =
      pipeline.run_verify_answers(diag, config.output_dir / "validated.jsonl");
  CHECK(summary.kept == 1);
  CHECK(summary.rejected_different == 1);
  CHECK(summary.rejected_undecidable == 1);

  Diagnostics diag2;
  const auto kept = read_all_records(config.output_dir / "validated.jsonl", diag2);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == "good");
}

TEST_CASE("offline pipeline touches no network even with a transport wired in") {
  PipelineFixture fixture;
  auto deny = std::make_unique<DenyTransport>();
  DenyTransport* deny_raw = deny.get();
  Pipeline pipeline(fixture.config, std::move(deny));
  fixture.seed(pipeline);

  Diagnostics diag;
  pipeline.run_all(diag);
  CHECK(deny_raw->calls.load() == 0);
}

TEST_CASE("config json overlay parses every documented key") {
  PipelineConfig config;
  config.apply_json(nlohmann::json{{"input", "/tmp/in.jsonl"},
                                   {"output_dir", "/tmp/out"},
                                   {"endpoint", "http://example"},
                                   {"model", "m"},
                                   {"strategy", "multi2"},
                                   {"threshold", 0.9},
                                   {"concurrency", 8},
                                   {"offline", true},
                                   {"strict", true},
                                   {"group_by", "source"},
                                   {"limit", 5},
                                   {"seed", 11}});
  CHECK(config.input == "/tmp/in.jsonl");
  CHECK(config.strategy == Strategy::multi2);
  CHECK(config.threshold == doctest::Approx(0.9));
  CHECK(config.concurrency == 8);
  CHECK(config.offline);
  CHECK(config.strict);
  CHECK(config.group_by == GroupBy::source);
  CHECK(config.limit == 5);

  CHECK_THROWS_AS(config.apply_json(nlohmann::json{{"strategy", "bogus"}}),
                  FatalError);
}
