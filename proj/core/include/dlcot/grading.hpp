#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dlcot/answer.hpp"
#include "dlcot/diagnostics.hpp"
#include "dlcot/gateway.hpp"
#include "json.hpp"

namespace dlcot {

/// Three-tier completeness grade for one approach: did it derive a final
/// answer, and does that answer match the standard one.
enum class Completeness { correct, incorrect, incomplete };

const char* completeness_name(Completeness value);
Completeness completeness_from_name(std::string_view name);  // throws RecordError

/// A grader-quoted erroneous passage. The quote is always an exact substring
/// of the approach text at [begin, end); quotes that fail that check are
/// dropped at parse time, never stored.
struct ErrorSpan {
  std::string quote;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct StrategyLabel {
  Completeness completeness = Completeness::incomplete;
  bool has_derivation_error = false;
  std::vector<ErrorSpan> error_spans;
  std::string explanation;
};

nlohmann::json label_to_json(const StrategyLabel& label);
StrategyLabel label_from_json(const nlohmann::json& j);

/// Request builder shared with fixture seeding.
PromptRequest grade_request(std::string_view question, std::string_view gold_answer,
                            const std::vector<std::string>& approach_texts);

/// Parses one grader completion into labels, locating quoted erroneous parts
/// inside each approach text. Quotes that are not exact substrings are
/// dropped with a diagnostic; the label itself is kept. Throws RecordError
/// when a solution block or a required tag is missing or unreadable.
std::vector<StrategyLabel> parse_grader_output(
    const std::string& output, const std::vector<std::string>& approach_texts,
    Diagnostics& diag, const std::string& record_id = "");

/// Grades each approach independently against the gold boxed answer via the
/// gateway, with one repair re-prompt on unparseable output.
std::vector<StrategyLabel> grade(std::string_view question,
                                 std::string_view gold_answer,
                                 const std::vector<std::string>& approach_texts,
                                 Gateway& gateway, Diagnostics& diag,
                                 const std::string& record_id = "",
                                 int repair_budget = 1);

struct AuditReport {
  std::vector<std::string> flags;
  bool ok() const { return flags.empty(); }
};

/// Defends the label invariants: a Correct-labeled approach whose own boxed
/// answer is not equivalent to gold is flagged, as is any stored span that
/// fails the exact-substring check.
AuditReport audit_labels(const std::vector<StrategyLabel>& labels,
                         const std::vector<std::string>& approach_texts,
                         const AnswerForm& gold_answer);

}  // namespace dlcot
