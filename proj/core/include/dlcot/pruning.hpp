#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dlcot/answer.hpp"
#include "dlcot/diagnostics.hpp"
#include "dlcot/grading.hpp"
#include "dlcot/similarity.hpp"
#include "dlcot/structure.hpp"

namespace dlcot {

/// Pruning ablation strategies: remove the last 1 / last 2 / all redundant
/// approaches (in reverse document order), or additionally drop approaches
/// graded Incorrect plus their quoted erroneous steps.
enum class Strategy { multi1, multi2, multiall, multiall_incorrectness };

const char* strategy_name(Strategy strategy);
std::optional<Strategy> strategy_from_name(std::string_view name);
std::vector<Strategy> all_strategies();

/// The shortest complete reasoning chain that reaches the correct answer:
/// here, the earliest approach graded Correct whose own boxed answer is
/// equivalent to the conclusion's.
struct TrunkInfo {
  std::set<int> trunk_approaches;  // 1-based indices, nonempty
  AnswerForm trunk_answer;

  bool contains(int index) const {
    return trunk_approaches.count(index) > 0;
  }
};

/// Throws RecordError when no Correct approach matches the conclusion; such
/// records are excluded from optimization since the trajectory to the
/// correct answer cannot be preserved.
TrunkInfo identify_trunk(const ApproachTree& tree,
                         const std::vector<StrategyLabel>& labels,
                         const AnswerForm& conclusion_answer,
                         std::string_view original_text);

struct PlanOptions {
  /// When an Incorrect approach is the sole survivor of its cluster,
  /// multiall_incorrectness keeps it by default (diversity wins over error
  /// removal); setting this removes it anyway.
  bool remove_sole_incorrect = false;
};

struct PruningPlan {
  Strategy strategy = Strategy::multiall;
  std::set<int> removed_approaches;     // 1-based approach indices
  std::set<int> removed_verifications;  // 0-based verification item indices
  /// Erroneous-step deletions inside surviving approaches, spans relative to
  /// each approach's own text. Populated only by multiall_incorrectness;
  /// overlapping spans are merged.
  std::vector<std::pair<int, Span>> removed_spans;

  nlohmann::json to_json() const;
  static PruningPlan from_json(const nlohmann::json& j);
};

/// Computes which approaches, verifications, and spans a strategy removes,
/// under trunk preservation and the keep-one-per-cluster diversity rule.
/// Deterministic; the removed sets nest across multi1 <= multi2 <= multiall.
PruningPlan make_plan(const ClusterAssignment& approach_clusters,
                      const ClusterAssignment& verification_clusters,
                      const std::vector<StrategyLabel>& labels,
                      const TrunkInfo& trunk, Strategy strategy,
                      Diagnostics& diag, const std::string& record_id = "",
                      const PlanOptions& options = {});

}  // namespace dlcot
