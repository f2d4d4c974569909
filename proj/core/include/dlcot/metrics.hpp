#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dlcot/record.hpp"
#include "dlcot/similarity.hpp"
#include "dlcot/structure.hpp"
#include "dlcot/tokenize.hpp"
#include "json.hpp"

namespace dlcot {

/// Per-record analysis quantities. try_count = approach_count +
/// verification_count, and slope = try_count / cluster_count; a smaller
/// slope means more diverse exploration. cluster_count sums approach and
/// verification clusters, since both are clustered.
struct RecordMetrics {
  std::string record_id;
  std::string strategy;
  std::string source;
  std::optional<int> difficulty;

  std::size_t tokens_original = 0;
  std::size_t tokens_optimized = 0;
  std::size_t approach_count = 0;
  std::size_t verification_count = 0;
  std::size_t try_count = 0;
  std::size_t cluster_count = 0;
  double slope = 0.0;
  std::map<std::string, double> stage_distribution;  // section -> char share

  /// Throws RecordError when an identity fails.
  void validate() const;

  nlohmann::json to_json() const;
  static RecordMetrics from_json(const nlohmann::json& j);
};

RecordMetrics compute_metrics(const CoTRecord& record, const MacroSegments& segments,
                              const ApproachTree& tree,
                              const VerificationSet& verifications,
                              const ClusterAssignment& approach_clusters,
                              const ClusterAssignment& verification_clusters,
                              const std::string& optimized_text,
                              const std::string& strategy,
                              const Tokenizer& tokenizer);

enum class GroupBy { strategy, source, difficulty };

const char* group_by_name(GroupBy group_by);
std::optional<GroupBy> group_by_from_name(std::string_view name);

struct GroupStats {
  std::size_t records = 0;
  double tokens_original = 0.0;
  double tokens_optimized = 0.0;
  double approach_count = 0.0;
  double verification_count = 0.0;
  double try_count = 0.0;
  double cluster_count = 0.0;
  double slope = 0.0;
  double token_reduction = 0.0;  // 1 - mean(optimized) / mean(original)

  nlohmann::json to_json() const;
};

struct CorpusReport {
  GroupBy group_by = GroupBy::strategy;
  std::size_t records = 0;
  std::map<std::string, GroupStats> groups;  // empty groups are absent

  nlohmann::json to_json() const;
};

/// Per-group means of every metric field. Permutation-invariant over the
/// input order; validates the metric identities on every record first.
CorpusReport aggregate(const std::vector<RecordMetrics>& metrics, GroupBy group_by);

/// Writes report.json plus the plot-ready slope.csv and tokens.csv.
void write_report_files(const CorpusReport& report,
                        const std::filesystem::path& dir);

}  // namespace dlcot
