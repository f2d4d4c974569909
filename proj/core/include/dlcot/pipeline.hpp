#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dlcot/artifact_store.hpp"
#include "dlcot/diagnostics.hpp"
#include "dlcot/gateway.hpp"
#include "dlcot/metrics.hpp"
#include "dlcot/pruning.hpp"
#include "dlcot/record.hpp"
#include "dlcot/structure_parser.hpp"
#include "dlcot/tokenize.hpp"

namespace dlcot {

struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir;
  std::filesystem::path cache_dir;  // defaults to <output_dir>/cache

  std::string endpoint;
  std::string model = "offline";
  std::string api_key_env = "DLCOT_API_KEY";
  std::optional<std::string> system_prompt;

  Strategy strategy = Strategy::multiall;
  double threshold = 0.80;
  int concurrency = 4;
  bool offline = false;
  bool strict = false;
  bool remove_sole_incorrect = false;
  TokenizerSpec tokenizer;
  GroupBy group_by = GroupBy::strategy;
  std::optional<std::size_t> limit;
  unsigned seed = 0;  // reserved for sampling in fixture tooling

  ParserOptions parser;

  void validate() const;  // throws FatalError
  void apply_json(const nlohmann::json& j);  // config-file overlay
};

struct StageSummary {
  std::string stage;
  std::size_t processed = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;

  std::size_t total() const { return processed + failed + skipped; }
  nlohmann::json to_json() const;
};

struct ValidationSummary {
  std::size_t kept = 0;
  std::size_t rejected_different = 0;
  std::size_t rejected_undecidable = 0;
  std::size_t rejected_missing_boxed = 0;

  nlohmann::json to_json() const;
};

/// Drives the five stages over a corpus with resume, bounded concurrency,
/// and per-record failure isolation. Each stage reads the previous stage's
/// artifacts, skips records already completed (resume_point), and writes one
/// artifact per record plus a stage summary.
class Pipeline {
 public:
  /// `transport` is injectable for tests; offline pipelines never touch it.
  explicit Pipeline(PipelineConfig config,
                    std::unique_ptr<Transport> transport = nullptr);

  const PipelineConfig& config() const { return config_; }
  const std::vector<CoTRecord>& records() const { return records_; }
  Gateway& gateway() { return *gateway_; }
  ArtifactStore& store() { return store_; }

  StageSummary run_segment(Diagnostics& diag);
  StageSummary run_parse(Diagnostics& diag);
  StageSummary run_analyze(Diagnostics& diag);
  StageSummary run_optimize(Diagnostics& diag);
  StageSummary run_rewrite(Diagnostics& diag);  // also writes the final corpus
  CorpusReport run_report(Diagnostics& diag);

  /// All stages in order; returns the per-stage summaries.
  std::vector<StageSummary> run_all(Diagnostics& diag);

  /// Rule-based corpus filtering: keeps records whose boxed answer is
  /// equivalent to the gold answer, writes them to `output_corpus`.
  /// Undecidable verdicts reject.
  ValidationSummary run_verify_answers(Diagnostics& diag,
                                       const std::filesystem::path& output_corpus);

  std::filesystem::path final_corpus_path() const;

 private:
  StageSummary drive_stage(Stage stage, const std::string& strategy_dir,
                           Diagnostics& diag,
                           const std::function<nlohmann::json(const CoTRecord&)>& work);

  PipelineConfig config_;
  std::vector<CoTRecord> records_;
  ArtifactStore store_;
  std::unique_ptr<Gateway> gateway_;
  Tokenizer tokenizer_;
};

}  // namespace dlcot
