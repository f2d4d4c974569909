#include "dlcot/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "dlcot/digest.hpp"
#include "dlcot/errors.hpp"
#include "dlcot/grading.hpp"
#include "dlcot/reconstruct.hpp"
#include "dlcot/version.hpp"

namespace dlcot {

namespace fs = std::filesystem;

namespace {

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t pool_size =
      std::min(static_cast<std::size_t>(std::max(workers, 1)), count);
  if (pool_size == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto body = [&]() {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        abort.store(true);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(pool_size);
  for (std::size_t t = 0; t < pool_size; ++t) pool.emplace_back(body);
  for (auto& thread : pool) thread.join();
  if (fatal) std::rethrow_exception(fatal);
}

}  // namespace

void PipelineConfig::validate() const {
  if (input.empty()) throw FatalError("config: input corpus path is required");
  if (output_dir.empty()) throw FatalError("config: output directory is required");
  if (!offline && endpoint.empty()) {
    throw FatalError("config: endpoint is required unless running offline");
  }
  if (threshold < 0.0 || threshold > 1.0) {
    throw FatalError("config: similarity threshold must be in [0, 1]");
  }
  if (concurrency < 1) throw FatalError("config: concurrency must be >= 1");
}

void PipelineConfig::apply_json(const nlohmann::json& j) {
  if (j.contains("input")) input = j["input"].get<std::string>();
  if (j.contains("output_dir")) output_dir = j["output_dir"].get<std::string>();
  if (j.contains("cache_dir")) cache_dir = j["cache_dir"].get<std::string>();
  if (j.contains("endpoint")) endpoint = j["endpoint"].get<std::string>();
  if (j.contains("model")) model = j["model"].get<std::string>();
  if (j.contains("api_key_env")) api_key_env = j["api_key_env"].get<std::string>();
  if (j.contains("system_prompt")) system_prompt = j["system_prompt"].get<std::string>();
  if (j.contains("strategy")) {
    const auto parsed = strategy_from_name(j["strategy"].get<std::string>());
    if (!parsed) throw FatalError("config: unknown strategy " + j["strategy"].dump());
    strategy = *parsed;
  }
  if (j.contains("threshold")) threshold = j["threshold"].get<double>();
  if (j.contains("concurrency")) concurrency = j["concurrency"].get<int>();
  if (j.contains("offline")) offline = j["offline"].get<bool>();
  if (j.contains("strict")) strict = j["strict"].get<bool>();
  if (j.contains("remove_sole_incorrect")) {
    remove_sole_incorrect = j["remove_sole_incorrect"].get<bool>();
  }
  if (j.contains("vocab_file")) {
    tokenizer = TokenizerSpec::from_vocab(j["vocab_file"].get<std::string>());
  }
  if (j.contains("group_by")) {
    const auto parsed = group_by_from_name(j["group_by"].get<std::string>());
    if (!parsed) throw FatalError("config: unknown group_by " + j["group_by"].dump());
    group_by = *parsed;
  }
  if (j.contains("limit")) limit = j["limit"].get<std::size_t>();
  if (j.contains("seed")) seed = j["seed"].get<unsigned>();
}

nlohmann::json StageSummary::to_json() const {
  return nlohmann::json{{"stage", stage},
                        {"processed", processed},
                        {"failed", failed},
                        {"skipped", skipped}};
}

nlohmann::json ValidationSummary::to_json() const {
  return nlohmann::json{{"kept", kept},
                        {"rejected_different", rejected_different},
                        {"rejected_undecidable", rejected_undecidable},
                        {"rejected_missing_boxed", rejected_missing_boxed}};
}

Pipeline::Pipeline(PipelineConfig config, std::unique_ptr<Transport> transport)
    : config_(std::move(config)),
      store_(config_.output_dir / "artifacts"),
      tokenizer_(config_.tokenizer) {
  config_.validate();
  if (config_.cache_dir.empty()) {
    config_.cache_dir = config_.output_dir / "cache";
  }
  std::error_code ec;
  fs::create_directories(config_.output_dir, ec);
  if (ec) {
    throw FatalError("cannot create output directory " +
                     config_.output_dir.string() + ": " + ec.message());
  }

  GatewayConfig gateway_config;
  gateway_config.endpoint = config_.endpoint;
  gateway_config.model = config_.model;
  gateway_config.api_key_env = config_.api_key_env;
  gateway_config.cache_dir = config_.cache_dir;
  gateway_config.offline = config_.offline;
  gateway_config.system_prompt = config_.system_prompt;
  gateway_config.concurrency = config_.concurrency;
  gateway_ = std::make_unique<Gateway>(gateway_config, std::move(transport));

  Diagnostics load_diag(&std::cerr);
  ReadOptions options;
  options.limit = config_.limit;
  options.strict = config_.strict;
  records_ = read_all_records(config_.input, load_diag, options);
}

StageSummary Pipeline::drive_stage(
    Stage stage, const std::string& strategy_dir, Diagnostics& diag,
    const std::function<nlohmann::json(const CoTRecord&)>& work) {
  StageSummary summary;
  summary.stage = ArtifactStore::stage_dir_name(stage, strategy_dir);

  const std::set<std::string> done = store_.resume_point(stage, diag, strategy_dir);

  std::atomic<std::size_t> processed{0};
  std::atomic<std::size_t> failed{0};
  std::atomic<std::size_t> skipped{0};

  parallel_for(records_.size(), config_.concurrency, [&](std::size_t i) {
    const CoTRecord& record = records_[i];
    if (done.count(record.id) > 0) {
      skipped.fetch_add(1);
      return;
    }
    try {
      StageArtifact artifact;
      artifact.record_id = record.id;
      artifact.stage = stage;
      artifact.payload = work(record);
      artifact.pipeline_version = kPipelineVersion;
      store_.write(artifact, strategy_dir);
      processed.fetch_add(1);
    } catch (const RecordError& e) {
      failed.fetch_add(1);
      diag.emit(record.id, summary.stage, e.what());
    }
  });

  summary.processed = processed.load();
  summary.failed = failed.load();
  summary.skipped = skipped.load();

  const fs::path summary_dir = config_.output_dir / "summaries";
  std::error_code ec;
  fs::create_directories(summary_dir, ec);
  if (!ec) {
    std::ofstream out(summary_dir / (summary.stage + ".json"), std::ios::trunc);
    out << summary.to_json().dump(2) << "\n";
  }

  if (config_.strict && summary.failed > 0) {
    throw FatalError("stage " + summary.stage + " had " +
                     std::to_string(summary.failed) + " record failures (strict mode)");
  }
  return summary;
}

namespace {

std::string solution_hash(const CoTRecord& record) {
  return sha256_hex(record.solution_text);
}

void check_solution_hash(const nlohmann::json& payload, const CoTRecord& record) {
  if (payload.contains("solution_sha256") &&
      payload["solution_sha256"].get<std::string>() != solution_hash(record)) {
    throw RecordError("artifact was produced from a different solution text; "
                      "clear the artifact directory to reprocess");
  }
}

}  // namespace

StageSummary Pipeline::run_segment(Diagnostics& diag) {
  return drive_stage(Stage::segmented, "", diag, [&](const CoTRecord& record) {
    const MacroSegments segments =
        segment_macro(record, *gateway_, diag, config_.parser);
    nlohmann::json payload = segments.to_payload(record.solution_text);
    payload["solution_sha256"] = solution_hash(record);
    return payload;
  });
}

static nlohmann::json require_payload(ArtifactStore& store, Stage stage,
                                      const std::string& strategy,
                                      const CoTRecord& record, Diagnostics& diag) {
  const auto artifact = store.read(stage, strategy, record.id, diag);
  if (!artifact) {
    throw RecordError(std::string("missing ") +
                      ArtifactStore::stage_dir_name(stage, strategy) +
                      " artifact (earlier stage failed or was not run)");
  }
  check_solution_hash(artifact->payload, record);
  return artifact->payload;
}

StageSummary Pipeline::run_parse(Diagnostics& diag) {
  return drive_stage(Stage::parsed, "", diag, [&](const CoTRecord& record) {
    const nlohmann::json segmented =
        require_payload(store_, Stage::segmented, "", record, diag);
    const MacroSegments segments = MacroSegments::from_payload(segmented);

    ApproachTree tree;
    const auto approach_section = segments.find(MacroSection::approach_explore);
    if (approach_section && !approach_section->empty()) {
      tree = parse_approaches(record, segments, *gateway_, diag, config_.parser);
    } else {
      diag.emit(record.id, "parsed",
                "no approach exploration section; record passes through unchanged");
    }
    const VerificationSet verifications =
        parse_verifications(record, segments, *gateway_, diag, config_.parser);

    nlohmann::json payload{{"approaches", tree.to_payload(record.solution_text)},
                           {"verifications", verifications.to_payload(record.solution_text)},
                           {"solution_sha256", solution_hash(record)}};
    return payload;
  });
}

StageSummary Pipeline::run_analyze(Diagnostics& diag) {
  return drive_stage(Stage::analyzed, "", diag, [&](const CoTRecord& record) {
    const nlohmann::json parsed =
        require_payload(store_, Stage::parsed, "", record, diag);
    const ApproachTree tree = ApproachTree::from_payload(parsed.at("approaches"));
    const VerificationSet verifications =
        VerificationSet::from_payload(parsed.at("verifications"));

    nlohmann::json payload{{"solution_sha256", solution_hash(record)}};
    if (tree.approaches.empty()) {
      payload["passthrough"] = true;
      payload["approach_clusters"] = ClusterAssignment{}.to_json();
      payload["verification_clusters"] = ClusterAssignment{}.to_json();
      payload["labels"] = nlohmann::json::array();
      return payload;
    }

    std::vector<std::string> approach_texts;
    for (const Approach& approach : tree.approaches) {
      approach_texts.emplace_back(approach.full_span().slice(record.solution_text));
    }

    SimilarityConfig similarity;
    similarity.threshold = config_.threshold;
    const ClusterAssignment approach_clusters =
        cluster_texts(approach_texts, similarity, ClusterItemKind::approach);

    ClusterAssignment verification_clusters;
    verification_clusters.item_kind = ClusterItemKind::verification;
    if (!verifications.items.empty()) {
      std::vector<std::string> verification_texts;
      for (const VerificationItem& item : verifications.items) {
        verification_texts.emplace_back(item.span.slice(record.solution_text));
      }
      verification_clusters = cluster_texts(verification_texts, similarity,
                                            ClusterItemKind::verification);
    }

    const std::vector<StrategyLabel> labels =
        grade(record.question, record.gold_answer, approach_texts, *gateway_, diag,
              record.id, config_.parser.repair_budget);

    const AuditReport audit =
        audit_labels(labels, approach_texts, answer_from_text(record.gold_answer));
    for (const std::string& flag : audit.flags) {
      diag.emit(record.id, "analyzed", "audit: " + flag);
    }

    payload["approach_clusters"] = approach_clusters.to_json();
    payload["verification_clusters"] = verification_clusters.to_json();
    nlohmann::json labels_json = nlohmann::json::array();
    for (const StrategyLabel& label : labels) labels_json.push_back(label_to_json(label));
    payload["labels"] = labels_json;
    nlohmann::json flags_json = nlohmann::json::array();
    for (const std::string& flag : audit.flags) flags_json.push_back(flag);
    payload["audit_flags"] = flags_json;
    return payload;
  });
}

StageSummary Pipeline::run_optimize(Diagnostics& diag) {
  const std::string strategy_dir = strategy_name(config_.strategy);
  return drive_stage(Stage::optimized, strategy_dir, diag, [&](const CoTRecord& record) {
    const nlohmann::json analyzed =
        require_payload(store_, Stage::analyzed, "", record, diag);

    nlohmann::json payload{{"solution_sha256", solution_hash(record)},
                           {"strategy", strategy_dir}};
    if (analyzed.value("passthrough", false)) {
      payload["passthrough"] = true;
      return payload;
    }

    const nlohmann::json segmented =
        require_payload(store_, Stage::segmented, "", record, diag);
    const MacroSegments segments = MacroSegments::from_payload(segmented);
    const nlohmann::json parsed =
        require_payload(store_, Stage::parsed, "", record, diag);
    const ApproachTree tree = ApproachTree::from_payload(parsed.at("approaches"));

    const auto conclusion = segments.find(MacroSection::conclusion);
    if (!conclusion) throw RecordError("segmented artifact lacks a conclusion section");
    const auto conclusion_answer =
        extract_boxed(conclusion->slice(record.solution_text), &diag);
    if (!conclusion_answer) {
      throw RecordError("conclusion has no boxed answer; cannot identify trunk");
    }

    std::vector<StrategyLabel> labels;
    for (const auto& j : analyzed.at("labels")) labels.push_back(label_from_json(j));

    const ClusterAssignment approach_clusters =
        ClusterAssignment::from_json(analyzed.at("approach_clusters"));
    const ClusterAssignment verification_clusters =
        ClusterAssignment::from_json(analyzed.at("verification_clusters"));

    const TrunkInfo trunk =
        identify_trunk(tree, labels, *conclusion_answer, record.solution_text);

    PlanOptions plan_options;
    plan_options.remove_sole_incorrect = config_.remove_sole_incorrect;
    const PruningPlan plan =
        make_plan(approach_clusters, verification_clusters, labels, trunk,
                  config_.strategy, diag, record.id, plan_options);

    payload["plan"] = plan.to_json();
    payload["trunk"] = nlohmann::json{
        {"approaches", std::vector<int>(trunk.trunk_approaches.begin(),
                                        trunk.trunk_approaches.end())},
        {"answer", trunk.trunk_answer.raw}};
    return payload;
  });
}

StageSummary Pipeline::run_rewrite(Diagnostics& diag) {
  const std::string strategy_dir = strategy_name(config_.strategy);
  StageSummary summary = drive_stage(
      Stage::reconstructed, strategy_dir, diag, [&](const CoTRecord& record) {
        const nlohmann::json optimized =
            require_payload(store_, Stage::optimized, strategy_dir, record, diag);

        nlohmann::json payload{{"solution_sha256", solution_hash(record)},
                               {"strategy", strategy_dir}};
        const std::size_t tokens_original = tokenizer_.count(record.solution_text);

        if (optimized.value("passthrough", false)) {
          payload["passthrough"] = true;
          payload["text"] = record.solution_text;
          payload["final_answer"] = "";
          payload["edit_log"] = nlohmann::json::array();
          payload["token_counts"] = {{"original", tokens_original},
                                     {"optimized", tokens_original}};
          return payload;
        }

        const nlohmann::json segmented =
            require_payload(store_, Stage::segmented, "", record, diag);
        const MacroSegments segments = MacroSegments::from_payload(segmented);
        const nlohmann::json parsed =
            require_payload(store_, Stage::parsed, "", record, diag);
        const ApproachTree tree = ApproachTree::from_payload(parsed.at("approaches"));
        const VerificationSet verifications =
            VerificationSet::from_payload(parsed.at("verifications"));
        const PruningPlan plan = PruningPlan::from_json(optimized.at("plan"));

        const ReconstructedCoT result =
            reconstruct(record.solution_text, plan, segments, tree, verifications,
                        *gateway_, diag, record.id);

        const SplicePlan splice_plan =
            splice(record.solution_text, plan, segments, tree, verifications);
        const ReconstructionReport report = validate_reconstruction(
            record.solution_text, result, splice_plan, tokenizer_);
        if (!report.pass) {
          std::string joined;
          for (const auto& failure : report.failures) {
            if (!joined.empty()) joined += "; ";
            joined += failure;
          }
          throw RecordError("reconstruction validation failed: " + joined);
        }

        nlohmann::json edit_log = nlohmann::json::array();
        for (const auto& entry : result.edit_log) {
          edit_log.push_back({{"junction", entry.junction_index},
                              {"inserted", entry.inserted}});
        }
        payload["text"] = result.text;
        payload["final_answer"] = result.final_answer.raw;
        payload["edit_log"] = edit_log;
        payload["token_counts"] = {{"original", tokens_original},
                                   {"optimized", tokenizer_.count(result.text)}};
        return payload;
      });

  // Final corpus in input order, one line per reconstructed record.
  std::ofstream out(final_corpus_path(), std::ios::trunc);
  if (!out.is_open()) {
    throw FatalError("cannot write final corpus: " + final_corpus_path().string());
  }
  for (const CoTRecord& record : records_) {
    const auto artifact =
        store_.read(Stage::reconstructed, strategy_dir, record.id, diag);
    if (!artifact) continue;
    const auto& payload = artifact->payload;
    nlohmann::json line{
        {"id", record.id},
        {"question", record.question},
        {"optimized_solution", payload.at("text").get<std::string>()},
        {"strategy", strategy_dir},
        {"token_counts", payload.at("token_counts")}};
    out << line.dump() << "\n";
  }
  return summary;
}

CorpusReport Pipeline::run_report(Diagnostics& diag) {
  // Discover every strategy that has reconstructed artifacts.
  std::vector<std::string> strategies;
  std::error_code ec;
  if (fs::exists(store_.root(), ec)) {
    for (const auto& entry : fs::directory_iterator(store_.root())) {
      if (!entry.is_directory()) continue;
      const std::string name = entry.path().filename().string();
      const std::string prefix = std::string(stage_name(Stage::reconstructed)) + "-";
      if (name.rfind(prefix, 0) == 0) {
        strategies.push_back(name.substr(prefix.size()));
      }
    }
  }
  std::sort(strategies.begin(), strategies.end());

  std::vector<RecordMetrics> metrics;
  for (const CoTRecord& record : records_) {
    for (const std::string& strategy : strategies) {
      const auto reconstructed =
          store_.read(Stage::reconstructed, strategy, record.id, diag);
      if (!reconstructed) continue;
      if (reconstructed->payload.value("passthrough", false)) {
        diag.emit(record.id, "report", "passthrough record skipped in metrics");
        continue;
      }
      const auto segmented = store_.read(Stage::segmented, "", record.id, diag);
      const auto parsed = store_.read(Stage::parsed, "", record.id, diag);
      const auto analyzed = store_.read(Stage::analyzed, "", record.id, diag);
      if (!segmented || !parsed || !analyzed) {
        diag.emit(record.id, "report", "missing earlier artifacts; record skipped");
        continue;
      }
      try {
        metrics.push_back(compute_metrics(
            record, MacroSegments::from_payload(segmented->payload),
            ApproachTree::from_payload(parsed->payload.at("approaches")),
            VerificationSet::from_payload(parsed->payload.at("verifications")),
            ClusterAssignment::from_json(analyzed->payload.at("approach_clusters")),
            ClusterAssignment::from_json(analyzed->payload.at("verification_clusters")),
            reconstructed->payload.at("text").get<std::string>(), strategy,
            tokenizer_));
      } catch (const RecordError& e) {
        diag.emit(record.id, "report", e.what());
      }
    }
  }

  const CorpusReport report = aggregate(metrics, config_.group_by);
  write_report_files(report, config_.output_dir / "report");

  // Raw per-record metrics alongside the aggregates.
  std::ofstream out(config_.output_dir / "report" / "records.jsonl", std::ios::trunc);
  for (const RecordMetrics& m : metrics) out << m.to_json().dump() << "\n";
  return report;
}

std::vector<StageSummary> Pipeline::run_all(Diagnostics& diag) {
  std::vector<StageSummary> summaries;
  summaries.push_back(run_segment(diag));
  summaries.push_back(run_parse(diag));
  summaries.push_back(run_analyze(diag));
  summaries.push_back(run_optimize(diag));
  summaries.push_back(run_rewrite(diag));
  try {
    run_report(diag);
  } catch (const RecordError& e) {
    diag.emit("", "report", e.what());
  }
  return summaries;
}

ValidationSummary Pipeline::run_verify_answers(
    Diagnostics& diag, const std::filesystem::path& output_corpus) {
  ValidationSummary summary;
  std::vector<CoTRecord> kept;
  for (const CoTRecord& record : records_) {
    const auto boxed = extract_boxed(record.solution_text, &diag);
    if (!boxed) {
      ++summary.rejected_missing_boxed;
      diag.emit(record.id, "verify-answers", "no boxed answer in solution");
      continue;
    }
    const AnswerForm gold = answer_from_text(record.gold_answer);
    const EquivalenceResult verdict = equivalent(*boxed, gold);
    switch (verdict.verdict) {
      case Verdict::equivalent:
        ++summary.kept;
        kept.push_back(record);
        break;
      case Verdict::different:
        ++summary.rejected_different;
        diag.emit(record.id, "verify-answers",
                  "answer differs from gold: " + verdict.reason);
        break;
      case Verdict::undecidable:
        ++summary.rejected_undecidable;
        diag.emit(record.id, "verify-answers",
                  "equivalence undecidable, rejected: " + verdict.reason);
        break;
    }
  }
  write_records(output_corpus, kept);
  return summary;
}

fs::path Pipeline::final_corpus_path() const {
  return config_.output_dir /
         ("corpus-" + std::string(strategy_name(config_.strategy)) + ".jsonl");
}

}  // namespace dlcot
