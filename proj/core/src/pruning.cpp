#include "dlcot/pruning.hpp"

#include <algorithm>
#include <cctype>

#include "dlcot/errors.hpp"

namespace dlcot {

const char* strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::multi1: return "multi1";
    case Strategy::multi2: return "multi2";
    case Strategy::multiall: return "multiall";
    case Strategy::multiall_incorrectness: return "multiall_incorrectness";
  }
  return "unknown";
}

std::optional<Strategy> strategy_from_name(std::string_view name) {
  std::string folded;
  for (char c : name) {
    folded += (c == '-') ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (folded == "multi1") return Strategy::multi1;
  if (folded == "multi2") return Strategy::multi2;
  if (folded == "multiall") return Strategy::multiall;
  if (folded == "multiall_incorrectness") return Strategy::multiall_incorrectness;
  return std::nullopt;
}

std::vector<Strategy> all_strategies() {
  return {Strategy::multi1, Strategy::multi2, Strategy::multiall,
          Strategy::multiall_incorrectness};
}

TrunkInfo identify_trunk(const ApproachTree& tree,
                         const std::vector<StrategyLabel>& labels,
                         const AnswerForm& conclusion_answer,
                         std::string_view original_text) {
  if (tree.approaches.empty()) {
    throw RecordError("identify_trunk: record has no approaches");
  }
  if (labels.size() != tree.approaches.size()) {
    throw RecordError("identify_trunk: label count does not match approach count");
  }

  for (std::size_t i = 0; i < tree.approaches.size(); ++i) {
    if (labels[i].completeness != Completeness::correct) continue;
    const auto boxed = extract_boxed(tree.approaches[i].full_span().slice(original_text));
    if (!boxed) continue;
    if (equivalent(*boxed, conclusion_answer).verdict == Verdict::equivalent) {
      TrunkInfo trunk;
      trunk.trunk_approaches.insert(tree.approaches[i].index);
      trunk.trunk_answer = *boxed;
      return trunk;
    }
  }
  throw RecordError(
      "identify_trunk: no Correct approach reaches the conclusion's answer; "
      "record excluded from optimization");
}

nlohmann::json PruningPlan::to_json() const {
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& [index, span] : removed_spans) {
    spans.push_back({{"approach", index}, {"begin", span.begin}, {"end", span.end}});
  }
  return nlohmann::json{
      {"strategy", strategy_name(strategy)},
      {"removed_approaches", removed_approaches},
      {"removed_verifications", removed_verifications},
      {"removed_spans", spans}};
}

PruningPlan PruningPlan::from_json(const nlohmann::json& j) {
  PruningPlan plan;
  const auto strategy = strategy_from_name(j.at("strategy").get<std::string>());
  if (!strategy) {
    throw RecordError("plan names unknown strategy: " +
                      j.at("strategy").get<std::string>());
  }
  plan.strategy = *strategy;
  for (const auto& v : j.at("removed_approaches")) plan.removed_approaches.insert(v.get<int>());
  for (const auto& v : j.at("removed_verifications")) plan.removed_verifications.insert(v.get<int>());
  for (const auto& span : j.at("removed_spans")) {
    plan.removed_spans.emplace_back(
        span.at("approach").get<int>(),
        Span{span.at("begin").get<std::size_t>(), span.at("end").get<std::size_t>()});
  }
  return plan;
}

namespace {

// Representative of a cluster: a trunk member when the cluster holds one,
// else the earliest Correct member, else the earliest member. Document flow
// is preserved and the most trustworthy exemplar survives.
int cluster_representative(const std::vector<int>& members,
                           const std::vector<StrategyLabel>& labels,
                           const TrunkInfo& trunk) {
  for (int member : members) {
    if (trunk.contains(member + 1)) return member;
  }
  for (int member : members) {
    if (static_cast<std::size_t>(member) < labels.size() &&
        labels[member].completeness == Completeness::correct) {
      return member;
    }
  }
  return members.front();
}

}  // namespace

PruningPlan make_plan(const ClusterAssignment& approach_clusters,
                      const ClusterAssignment& verification_clusters,
                      const std::vector<StrategyLabel>& labels,
                      const TrunkInfo& trunk, Strategy strategy,
                      Diagnostics& diag, const std::string& record_id,
                      const PlanOptions& options) {
  if (trunk.trunk_approaches.empty()) {
    throw RecordError("make_plan: trunk is empty");
  }
  const std::size_t approach_count = approach_clusters.cluster_of.size();
  for (int index : trunk.trunk_approaches) {
    if (index < 1 || static_cast<std::size_t>(index) > approach_count) {
      throw RecordError("make_plan: trunk approach index out of range");
    }
  }

  PruningPlan plan;
  plan.strategy = strategy;

  // Redundant approaches: every non-representative cluster member, removed
  // in reverse document order.
  std::vector<int> redundant;  // 0-based
  for (const auto& members : approach_clusters.clusters) {
    const int representative = cluster_representative(members, labels, trunk);
    for (int member : members) {
      if (member != representative) redundant.push_back(member);
    }
  }
  std::sort(redundant.rbegin(), redundant.rend());

  std::size_t take = redundant.size();
  if (strategy == Strategy::multi1) take = std::min<std::size_t>(take, 1);
  if (strategy == Strategy::multi2) take = std::min<std::size_t>(take, 2);
  for (std::size_t i = 0; i < take; ++i) {
    plan.removed_approaches.insert(redundant[i] + 1);
  }

  if (strategy == Strategy::multiall_incorrectness) {
    // Drop Incorrect approaches too, unless that would empty their cluster.
    for (int item = static_cast<int>(approach_count) - 1; item >= 0; --item) {
      if (plan.removed_approaches.count(item + 1) > 0) continue;
      if (static_cast<std::size_t>(item) >= labels.size()) continue;
      if (labels[item].completeness != Completeness::incorrect) continue;

      const auto& members = approach_clusters.clusters[approach_clusters.cluster_of[item]];
      bool sole_survivor = true;
      for (int member : members) {
        if (member != item && plan.removed_approaches.count(member + 1) == 0) {
          sole_survivor = false;
          break;
        }
      }
      if (sole_survivor && !options.remove_sole_incorrect) {
        diag.emit(record_id, "optimized",
                  "approach " + std::to_string(item + 1) +
                      " is Incorrect but kept: removing it would empty its cluster");
        continue;
      }
      if (sole_survivor) {
        diag.emit(record_id, "optimized",
                  "approach " + std::to_string(item + 1) +
                      " is Incorrect and removed despite emptying its cluster "
                      "(remove_sole_incorrect set)");
      }
      plan.removed_approaches.insert(item + 1);
    }

    // Schedule deletion of quoted erroneous steps in surviving approaches.
    for (std::size_t i = 0; i < labels.size() && i < approach_count; ++i) {
      if (plan.removed_approaches.count(static_cast<int>(i) + 1) > 0) continue;
      std::vector<Span> spans;
      for (const auto& span : labels[i].error_spans) {
        spans.push_back(Span{span.begin, span.end});
      }
      for (const Span& span : merge_spans(std::move(spans))) {
        plan.removed_spans.emplace_back(static_cast<int>(i) + 1, span);
      }
    }
  }

  // Verification duplicates are pruned only by the aggressive strategies.
  if (strategy == Strategy::multiall || strategy == Strategy::multiall_incorrectness) {
    for (const auto& members : verification_clusters.clusters) {
      for (std::size_t i = 1; i < members.size(); ++i) {
        plan.removed_verifications.insert(members[i]);
      }
    }
  }

  // Invariant checks: the trunk survives, and every original approach
  // cluster keeps at least one member (unless deliberately overridden).
  for (int index : trunk.trunk_approaches) {
    if (plan.removed_approaches.count(index) > 0) {
      throw RecordError("make_plan: plan would remove a trunk approach");
    }
  }
  for (std::size_t c = 0; c < approach_clusters.clusters.size(); ++c) {
    bool survivor = false;
    for (int member : approach_clusters.clusters[c]) {
      if (plan.removed_approaches.count(member + 1) == 0) {
        survivor = true;
        break;
      }
    }
    if (!survivor && !options.remove_sole_incorrect) {
      throw RecordError("make_plan: plan would empty approach cluster " +
                        std::to_string(c));
    }
  }
  return plan;
}

}  // namespace dlcot
