#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dlcot/span.hpp"
#include "json.hpp"

namespace dlcot {

/// The macro components of a long reasoning trace, in canonical document
/// order. problem_understand and verify are optional; a trace may also lack
/// approach_explore entirely (bare restatement + answer).
enum class MacroSection {
  question_repeat,
  problem_understand,
  approach_explore,
  verify,
  conclusion,
};

const char* macro_section_name(MacroSection section);  // "Question_Repeat", ...

/// Accepts canonical names plus aliases ("Solution_Explore" for
/// approach_explore), case-insensitively, with spaces or underscores.
std::optional<MacroSection> macro_section_from_name(std::string_view name);

/// Macro segmentation of one trace. Spans index the ORIGINAL solution text
/// and tile it exactly: every byte belongs to exactly one present section.
struct MacroSegments {
  struct Entry {
    MacroSection section;
    Span span;
  };
  std::vector<Entry> entries;  // document order

  bool has(MacroSection section) const;
  std::optional<Span> find(MacroSection section) const;
  std::vector<MacroSection> order() const;
  std::vector<Span> spans() const;

  nlohmann::json to_payload(std::string_view original) const;
  static MacroSegments from_payload(const nlohmann::json& payload);
};

struct ApproachStage {
  std::string name;
  Span span;
};

/// One self-contained solution attempt, subdivided into stages. full_span()
/// covers the approach from its first stage to its last.
struct Approach {
  int index = 0;  // 1-based, contiguous
  std::vector<ApproachStage> stages;

  Span full_span() const;
};

struct ApproachTree {
  std::vector<Approach> approaches;

  nlohmann::json to_payload(std::string_view original) const;
  static ApproachTree from_payload(const nlohmann::json& payload);
};

enum class VerificationFlag { self_affirmation, self_negation, substantive };

const char* verification_flag_name(VerificationFlag flag);

/// Flag derived from the category name: "Self-Affirmation"-like categories
/// are self-talk agreement, "Self-Negation"-like are self-talk dismissal,
/// everything else is a substantive re-check.
VerificationFlag verification_flag_from_category(std::string_view category);

struct VerificationItem {
  std::string category;
  VerificationFlag flag = VerificationFlag::substantive;
  Span span;
};

struct VerificationSet {
  std::vector<VerificationItem> items;

  nlohmann::json to_payload(std::string_view original) const;
  static VerificationSet from_payload(const nlohmann::json& payload);
};

}  // namespace dlcot
