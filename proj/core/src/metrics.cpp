#include "dlcot/metrics.hpp"

#include <cmath>
#include <fstream>

#include "dlcot/errors.hpp"

namespace dlcot {

void RecordMetrics::validate() const {
  if (try_count != approach_count + verification_count) {
    throw RecordError("metrics: try_count != approach_count + verification_count for " +
                      record_id);
  }
  if (cluster_count < 1) {
    throw RecordError("metrics: cluster_count must be >= 1 for " + record_id);
  }
  const double expected_slope =
      static_cast<double>(try_count) / static_cast<double>(cluster_count);
  if (std::abs(slope - expected_slope) > 1e-12) {
    throw RecordError("metrics: slope != try_count / cluster_count for " + record_id);
  }
  if (!stage_distribution.empty()) {
    double sum = 0.0;
    for (const auto& [name, share] : stage_distribution) sum += share;
    if (std::abs(sum - 1.0) > 1e-9) {
      throw RecordError("metrics: stage distribution does not sum to 1 for " + record_id);
    }
  }
}

nlohmann::json RecordMetrics::to_json() const {
  nlohmann::json j{{"record_id", record_id},
                   {"strategy", strategy},
                   {"source", source},
                   {"tokens_original", tokens_original},
                   {"tokens_optimized", tokens_optimized},
                   {"approach_count", approach_count},
                   {"verification_count", verification_count},
                   {"try_count", try_count},
                   {"cluster_count", cluster_count},
                   {"slope", slope},
                   {"stage_distribution", stage_distribution}};
  if (difficulty) j["difficulty"] = *difficulty;
  return j;
}

RecordMetrics RecordMetrics::from_json(const nlohmann::json& j) {
  RecordMetrics m;
  m.record_id = j.value("record_id", std::string{});
  m.strategy = j.value("strategy", std::string{});
  m.source = j.value("source", std::string{});
  if (j.contains("difficulty")) m.difficulty = j["difficulty"].get<int>();
  m.tokens_original = j.at("tokens_original").get<std::size_t>();
  m.tokens_optimized = j.at("tokens_optimized").get<std::size_t>();
  m.approach_count = j.at("approach_count").get<std::size_t>();
  m.verification_count = j.at("verification_count").get<std::size_t>();
  m.try_count = j.at("try_count").get<std::size_t>();
  m.cluster_count = j.at("cluster_count").get<std::size_t>();
  m.slope = j.at("slope").get<double>();
  if (j.contains("stage_distribution")) {
    m.stage_distribution =
        j["stage_distribution"].get<std::map<std::string, double>>();
  }
  return m;
}

RecordMetrics compute_metrics(const CoTRecord& record, const MacroSegments& segments,
                              const ApproachTree& tree,
                              const VerificationSet& verifications,
                              const ClusterAssignment& approach_clusters,
                              const ClusterAssignment& verification_clusters,
                              const std::string& optimized_text,
                              const std::string& strategy,
                              const Tokenizer& tokenizer) {
  RecordMetrics m;
  m.record_id = record.id;
  m.strategy = strategy;
  m.source = record.source;
  m.difficulty = record.difficulty;

  m.tokens_original = tokenizer.count(record.solution_text);
  m.tokens_optimized = tokenizer.count(optimized_text);
  m.approach_count = tree.approaches.size();
  m.verification_count = verifications.items.size();
  m.try_count = m.approach_count + m.verification_count;
  m.cluster_count =
      approach_clusters.cluster_count() + verification_clusters.cluster_count();
  if (m.cluster_count == 0) {
    throw RecordError("metrics: record has no clustered items: " + record.id);
  }
  m.slope = static_cast<double>(m.try_count) / static_cast<double>(m.cluster_count);

  const double total = static_cast<double>(record.solution_text.size());
  if (total > 0) {
    for (const auto& entry : segments.entries) {
      m.stage_distribution[macro_section_name(entry.section)] =
          static_cast<double>(entry.span.size()) / total;
    }
  }

  m.validate();
  return m;
}

const char* group_by_name(GroupBy group_by) {
  switch (group_by) {
    case GroupBy::strategy: return "strategy";
    case GroupBy::source: return "source";
    case GroupBy::difficulty: return "difficulty";
  }
  return "unknown";
}

std::optional<GroupBy> group_by_from_name(std::string_view name) {
  if (name == "strategy") return GroupBy::strategy;
  if (name == "source") return GroupBy::source;
  if (name == "difficulty") return GroupBy::difficulty;
  return std::nullopt;
}

nlohmann::json GroupStats::to_json() const {
  return nlohmann::json{{"records", records},
                        {"tokens_original", tokens_original},
                        {"tokens_optimized", tokens_optimized},
                        {"approach_count", approach_count},
                        {"verification_count", verification_count},
                        {"try_count", try_count},
                        {"cluster_count", cluster_count},
                        {"slope", slope},
                        {"token_reduction", token_reduction}};
}

nlohmann::json CorpusReport::to_json() const {
  nlohmann::json groups_json = nlohmann::json::object();
  for (const auto& [name, stats] : groups) groups_json[name] = stats.to_json();
  return nlohmann::json{{"group_by", group_by_name(group_by)},
                        {"records", records},
                        {"groups", groups_json}};
}

CorpusReport aggregate(const std::vector<RecordMetrics>& metrics, GroupBy group_by) {
  if (metrics.empty()) {
    throw RecordError("aggregate: no metrics to aggregate");
  }

  CorpusReport report;
  report.group_by = group_by;
  report.records = metrics.size();

  std::map<std::string, std::vector<const RecordMetrics*>> grouped;
  for (const RecordMetrics& m : metrics) {
    m.validate();
    std::string key;
    switch (group_by) {
      case GroupBy::strategy: key = m.strategy; break;
      case GroupBy::source: key = m.source; break;
      case GroupBy::difficulty:
        key = m.difficulty ? std::to_string(*m.difficulty) : "";
        break;
    }
    if (key.empty()) continue;  // empty group is omitted
    grouped[key].push_back(&m);
  }

  for (const auto& [key, members] : grouped) {
    GroupStats stats;
    stats.records = members.size();
    for (const RecordMetrics* m : members) {
      stats.tokens_original += static_cast<double>(m->tokens_original);
      stats.tokens_optimized += static_cast<double>(m->tokens_optimized);
      stats.approach_count += static_cast<double>(m->approach_count);
      stats.verification_count += static_cast<double>(m->verification_count);
      stats.try_count += static_cast<double>(m->try_count);
      stats.cluster_count += static_cast<double>(m->cluster_count);
      stats.slope += m->slope;
    }
    const double n = static_cast<double>(stats.records);
    stats.tokens_original /= n;
    stats.tokens_optimized /= n;
    stats.approach_count /= n;
    stats.verification_count /= n;
    stats.try_count /= n;
    stats.cluster_count /= n;
    stats.slope /= n;
    stats.token_reduction =
        stats.tokens_original > 0
            ? 1.0 - stats.tokens_optimized / stats.tokens_original
            : 0.0;
    report.groups[key] = stats;
  }
  return report;
}

void write_report_files(const CorpusReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw FatalError("cannot create report directory " + dir.string() + ": " +
                     ec.message());
  }

  {
    std::ofstream out(dir / "report.json", std::ios::trunc);
    if (!out.is_open()) throw FatalError("cannot write report.json");
    out << report.to_json().dump(2) << "\n";
  }
  {
    std::ofstream out(dir / "slope.csv", std::ios::trunc);
    if (!out.is_open()) throw FatalError("cannot write slope.csv");
    out << group_by_name(report.group_by) << ",cluster_count,try_count,slope\n";
    for (const auto& [name, stats] : report.groups) {
      out << name << "," << stats.cluster_count << "," << stats.try_count << ","
          << stats.slope << "\n";
    }
  }
  {
    std::ofstream out(dir / "tokens.csv", std::ios::trunc);
    if (!out.is_open()) throw FatalError("cannot write tokens.csv");
    out << group_by_name(report.group_by)
        << ",tokens_original,tokens_optimized,token_reduction\n";
    for (const auto& [name, stats] : report.groups) {
      out << name << "," << stats.tokens_original << "," << stats.tokens_optimized
          << "," << stats.token_reduction << "\n";
    }
  }
}

}  // namespace dlcot
