// dlcot: deconstruct, prune, and reconstruct long reasoning traces.
//
// Stages read the previous stage's artifacts and skip records already
// completed, so any stage can be re-run or resumed. Exit codes: 0 success,
// 1 fatal configuration or I/O error, 2 completed with per-record failures.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dlcot/errors.hpp"
#include "dlcot/pipeline.hpp"
#include "dlcot/version.hpp"

namespace {

struct CliOptions {
  dlcot::PipelineConfig config;
  std::string config_file;
  std::string strategy = "multiall";
  std::string group_by = "strategy";
  std::string vocab_file;
  bool quiet = false;
};

void add_common_flags(CLI::App* cmd, CliOptions& options) {
  cmd->add_option("--input", options.config.input, "input corpus (JSON lines)");
  cmd->add_option("--output-dir", options.config.output_dir,
                  "directory for artifacts, summaries, and reports");
  cmd->add_option("--cache-dir", options.config.cache_dir,
                  "completion cache / offline replay store (default <output-dir>/cache)");
  cmd->add_option("--endpoint", options.config.endpoint,
                  "chat-completions endpoint URL");
  cmd->add_option("--model", options.config.model, "model id sent to the endpoint");
  cmd->add_option("--strategy", options.strategy,
                  "pruning strategy: multi1, multi2, multiall, multiall_incorrectness");
  cmd->add_option("--threshold", options.config.threshold,
                  "similarity threshold for clustering (default 0.80)");
  cmd->add_option("--concurrency", options.config.concurrency,
                  "worker and in-flight request bound (default 4)");
  cmd->add_flag("--offline", options.config.offline,
                "replay completions from the cache; any miss is fatal");
  cmd->add_flag("--strict", options.config.strict,
                "escalate per-record failures and malformed input lines to fatal");
  cmd->add_option("--config", options.config_file, "JSON config file (flags override)");
  cmd->add_option("--limit", options.config.limit, "process at most N records");
  cmd->add_option("--group-by", options.group_by,
                  "report grouping: strategy, source, difficulty");
  cmd->add_option("--vocab-file", options.vocab_file,
                  "subword vocabulary for token counting (default: built-in splitter)");
  cmd->add_flag("--remove-sole-incorrect", options.config.remove_sole_incorrect,
                "multiall_incorrectness: drop Incorrect approaches even when "
                "that empties their cluster");
  cmd->add_flag("--quiet", options.quiet, "suppress per-record diagnostics");
}

// Config file first, then flags override whatever the user passed.
void finalize_config(CliOptions& options, const CLI::App* cmd) {
  if (!options.config_file.empty()) {
    std::ifstream in(options.config_file);
    if (!in.is_open()) {
      throw dlcot::FatalError("cannot open config file: " + options.config_file);
    }
    nlohmann::json j;
    in >> j;

    dlcot::PipelineConfig from_file;
    from_file.apply_json(j);
    auto keep_flag = [&](const std::string& name) {
      return cmd->count(name) > 0;
    };
    if (!keep_flag("--input") && !from_file.input.empty()) {
      options.config.input = from_file.input;
    }
    if (!keep_flag("--output-dir") && !from_file.output_dir.empty()) {
      options.config.output_dir = from_file.output_dir;
    }
    if (!keep_flag("--cache-dir") && !from_file.cache_dir.empty()) {
      options.config.cache_dir = from_file.cache_dir;
    }
    if (!keep_flag("--endpoint") && !from_file.endpoint.empty()) {
      options.config.endpoint = from_file.endpoint;
    }
    if (!keep_flag("--model")) options.config.model = from_file.model;
    if (!keep_flag("--threshold")) options.config.threshold = from_file.threshold;
    if (!keep_flag("--concurrency")) options.config.concurrency = from_file.concurrency;
    if (!keep_flag("--offline")) options.config.offline = from_file.offline;
    if (!keep_flag("--strict")) options.config.strict = from_file.strict;
    if (!keep_flag("--limit")) options.config.limit = from_file.limit;
    if (!keep_flag("--strategy") && j.contains("strategy")) {
      options.strategy = j["strategy"].get<std::string>();
    }
    if (!keep_flag("--group-by") && j.contains("group_by")) {
      options.group_by = j["group_by"].get<std::string>();
    }
    if (!keep_flag("--vocab-file") && j.contains("vocab_file")) {
      options.vocab_file = j["vocab_file"].get<std::string>();
    }
    if (j.contains("system_prompt")) {
      options.config.system_prompt = j["system_prompt"].get<std::string>();
    }
    if (j.contains("api_key_env")) {
      options.config.api_key_env = j["api_key_env"].get<std::string>();
    }
  }

  const auto strategy = dlcot::strategy_from_name(options.strategy);
  if (!strategy) throw dlcot::FatalError("unknown strategy: " + options.strategy);
  options.config.strategy = *strategy;

  const auto group_by = dlcot::group_by_from_name(options.group_by);
  if (!group_by) throw dlcot::FatalError("unknown group-by: " + options.group_by);
  options.config.group_by = *group_by;

  if (!options.vocab_file.empty()) {
    options.config.tokenizer = dlcot::TokenizerSpec::from_vocab(options.vocab_file);
  }
}

void print_summary(const dlcot::StageSummary& summary) {
  std::cout << summary.stage << ": processed " << summary.processed << ", failed "
            << summary.failed << ", skipped " << summary.skipped << "\n";
}

int failures_to_exit_code(std::size_t failed) { return failed > 0 ? 2 : 0; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DLCoT: long chain-of-thought deconstruction and optimization"};
  app.set_version_flag("--version", dlcot::kPipelineVersion);
  app.require_subcommand(1);

  CliOptions options;

  const char* stage_names[] = {"segment",  "parse",  "analyze",       "optimize",
                               "rewrite",  "report", "verify-answers", "run"};
  const char* stage_help[] = {
      "split traces into macro sections",
      "split approaches and verifications",
      "cluster approaches/verifications and grade them",
      "compute pruning plans for the chosen strategy",
      "splice kept spans and bridge junctions; writes the final corpus",
      "aggregate token and diversity metrics into report files",
      "rule-based answer validation; writes the filtered corpus",
      "all stages in order"};

  std::map<std::string, CLI::App*> commands;
  for (std::size_t i = 0; i < std::size(stage_names); ++i) {
    CLI::App* cmd = app.add_subcommand(stage_names[i], stage_help[i]);
    add_common_flags(cmd, options);
    commands[stage_names[i]] = cmd;
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    finalize_config(options, commands[subcommand]);

    dlcot::Diagnostics diag(options.quiet ? nullptr : &std::cerr);
    dlcot::Pipeline pipeline(options.config);

    if (subcommand == "segment") {
      const auto summary = pipeline.run_segment(diag);
      print_summary(summary);
      return failures_to_exit_code(summary.failed);
    }
    if (subcommand == "parse") {
      const auto summary = pipeline.run_parse(diag);
      print_summary(summary);
      return failures_to_exit_code(summary.failed);
    }
    if (subcommand == "analyze") {
      const auto summary = pipeline.run_analyze(diag);
      print_summary(summary);
      return failures_to_exit_code(summary.failed);
    }
    if (subcommand == "optimize") {
      const auto summary = pipeline.run_optimize(diag);
      print_summary(summary);
      return failures_to_exit_code(summary.failed);
    }
    if (subcommand == "rewrite") {
      const auto summary = pipeline.run_rewrite(diag);
      print_summary(summary);
      std::cout << "final corpus: " << pipeline.final_corpus_path().string() << "\n";
      return failures_to_exit_code(summary.failed);
    }
    if (subcommand == "report") {
      const auto report = pipeline.run_report(diag);
      std::cout << "report over " << report.records << " records written to "
                << (options.config.output_dir / "report").string() << "\n";
      return 0;
    }
    if (subcommand == "verify-answers") {
      const auto out_path = options.config.output_dir / "validated.jsonl";
      const auto summary = pipeline.run_verify_answers(diag, out_path);
      std::cout << "verify-answers: kept " << summary.kept << ", rejected "
                << (summary.rejected_different + summary.rejected_undecidable +
                    summary.rejected_missing_boxed)
                << " (different " << summary.rejected_different << ", undecidable "
                << summary.rejected_undecidable << ", no boxed answer "
                << summary.rejected_missing_boxed << ")\n"
                << "filtered corpus: " << out_path.string() << "\n";
      return 0;
    }

    // run: all stages
    const auto summaries = pipeline.run_all(diag);
    std::size_t failed = 0;
    for (const auto& summary : summaries) {
      print_summary(summary);
      failed += summary.failed;
    }
    std::cout << "final corpus: " << pipeline.final_corpus_path().string() << "\n";
    return failures_to_exit_code(failed);
  } catch (const dlcot::FatalError& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
}
