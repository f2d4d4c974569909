#include "dlcot/reconstruct.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "dlcot/errors.hpp"

namespace dlcot {

namespace {

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

bool is_sentence_end(std::string_view text, std::size_t i) {
  const char c = text[i];
  if (c != '.' && c != '!' && c != '?') return false;
  return i + 1 >= text.size() || text[i + 1] == ' ' || text[i + 1] == '\n';
}

// Last `count` sentences of `text`, capped in length.
std::string tail_sentences(std::string_view text, int count, std::size_t cap = 400) {
  if (text.size() > cap * 2) text = text.substr(text.size() - cap * 2);
  int seen = 0;
  std::size_t start = 0;
  for (std::size_t i = text.size(); i > 0; --i) {
    if (is_sentence_end(text, i - 1)) {
      ++seen;
      if (seen > count) {
        start = i;  // just after the terminator of the sentence before
        break;
      }
    }
  }
  std::string result = trim(text.substr(start));
  if (result.size() > cap) result = result.substr(result.size() - cap);
  return result;
}

std::string head_sentences(std::string_view text, int count, std::size_t cap = 400) {
  if (text.size() > cap * 2) text = text.substr(0, cap * 2);
  int seen = 0;
  std::size_t end = text.size();
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_sentence_end(text, i)) {
      ++seen;
      if (seen >= count) {
        end = i + 1;
        break;
      }
    }
  }
  std::string result = trim(text.substr(0, end));
  if (result.size() > cap) result = result.substr(0, cap);
  return result;
}

bool is_math_char(char c) {
  if (c >= '0' && c <= '9') return true;
  switch (c) {
    case '+': case '-': case '*': case '/': case '=':
    case '^': case '<': case '>': case '%':
      return true;
    default:
      return false;
  }
}

// No digits or math operators beyond what the contexts already contain.
bool introduces_new_math(std::string_view bridge_text, std::string_view before,
                         std::string_view after) {
  std::set<char> allowed;
  for (char c : before) {
    if (is_math_char(c)) allowed.insert(c);
  }
  for (char c : after) {
    if (is_math_char(c)) allowed.insert(c);
  }
  for (char c : bridge_text) {
    if (is_math_char(c) && allowed.count(c) == 0) return true;
  }
  return false;
}

bool starts_with_connective(std::string_view after) {
  static const char* kCues[] = {"alternatively", "let me",  "another",
                                "but ",          "wait",    "instead",
                                "now ",          "now,",    "next",
                                "on the other hand", "so,", "so "};
  const std::string head = [&] {
    std::string folded;
    for (char c : after.substr(0, 24)) {
      folded += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return folded;
  }();
  for (const char* cue : kCues) {
    if (head.rfind(cue, 0) == 0) return true;
  }
  return false;
}

}  // namespace

SplicePlan splice(std::string_view original, const PruningPlan& plan,
                  const MacroSegments& segments, const ApproachTree& tree,
                  const VerificationSet& verifications) {
  (void)segments;  // macro sections other than approaches/verify are never removed

  std::vector<Span> removed;
  for (const Approach& approach : tree.approaches) {
    if (plan.removed_approaches.count(approach.index) > 0) {
      removed.push_back(approach.full_span());
    }
  }
  for (int index : plan.removed_verifications) {
    if (index >= 0 && static_cast<std::size_t>(index) < verifications.items.size()) {
      removed.push_back(verifications.items[index].span);
    }
  }
  for (const auto& [approach_index, local_span] : plan.removed_spans) {
    for (const Approach& approach : tree.approaches) {
      if (approach.index != approach_index) continue;
      const std::size_t base = approach.full_span().begin;
      removed.push_back(Span{base + local_span.begin, base + local_span.end});
    }
  }

  SplicePlan result;
  result.kept_spans = complement_spans(original.size(), removed);
  for (std::size_t i = 0; i + 1 < result.kept_spans.size(); ++i) {
    const std::size_t gap_begin = result.kept_spans[i].end;
    const std::size_t gap_end = result.kept_spans[i + 1].begin;
    if (gap_end > gap_begin) {
      result.junctions.push_back(Junction{i, Span{gap_begin, gap_end}});
    }
  }
  return result;
}

std::string splice_draft(std::string_view original, const SplicePlan& plan) {
  std::string draft;
  for (const Span& span : plan.kept_spans) {
    draft += span.slice(original);
  }
  return draft;
}

PromptRequest bridge_request(std::string_view context_before,
                             std::string_view context_after) {
  PromptRequest request;
  request.template_id = TemplateId::coherence_rewrite;
  request.slots["before"] = std::string(context_before);
  request.slots["after"] = std::string(context_after);
  request.decoding.max_new_tokens = 128;
  return request;
}

std::string bridge(std::string_view context_before, std::string_view context_after,
                   Gateway& gateway, Diagnostics& diag,
                   const std::string& record_id) {
  if (starts_with_connective(trim(context_after))) {
    return "";  // the junction already reads fluently
  }

  const Tokenizer tokenizer;
  PromptRequest request = bridge_request(context_before, context_after);
  std::string reason;
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt > 0) request.correction = reason;
    std::string candidate;
    try {
      candidate = trim(gateway.complete(request).text);
    } catch (const MissingFixtureError&) {
      diag.emit(record_id, "reconstructed",
                "no offline fixture for bridge; using fallback connective");
      return kFallbackConnective;
    } catch (const RecordError& e) {
      diag.emit(record_id, "reconstructed",
                std::string("bridge generation failed (") + e.what() +
                    "); using fallback connective");
      return kFallbackConnective;
    }
    if (candidate.empty()) return "";
    if (tokenizer.count(candidate) > kBridgeTokenBudget) {
      reason = "transition exceeds the token budget";
      continue;
    }
    if (introduces_new_math(candidate, context_before, context_after)) {
      reason = "transition introduces numbers or operators absent from the contexts";
      continue;
    }
    return candidate;
  }
  diag.emit(record_id, "reconstructed",
            "bridge rejected after repair (" + reason + "); using fallback connective");
  return kFallbackConnective;
}

ReconstructedCoT reconstruct(std::string_view original, const PruningPlan& plan,
                             const MacroSegments& segments, const ApproachTree& tree,
                             const VerificationSet& verifications, Gateway& gateway,
                             Diagnostics& diag, const std::string& record_id) {
  const SplicePlan splice_plan = splice(original, plan, segments, tree, verifications);

  ReconstructedCoT result;
  std::size_t junction_cursor = 0;
  for (std::size_t i = 0; i < splice_plan.kept_spans.size(); ++i) {
    result.text += splice_plan.kept_spans[i].slice(original);
    while (junction_cursor < splice_plan.junctions.size() &&
           splice_plan.junctions[junction_cursor].after_kept_index == i) {
      const std::string_view next =
          splice_plan.kept_spans[i + 1].slice(original);
      const std::string before_ctx = tail_sentences(result.text, 2);
      const std::string after_ctx = head_sentences(next, 2);
      const std::string inserted =
          bridge(before_ctx, after_ctx, gateway, diag, record_id);
      if (!inserted.empty()) {
        result.text += "\n\n";
        result.text += inserted;
        result.text += "\n";
        result.edit_log.push_back(EditLogEntry{junction_cursor, inserted});
      }
      ++junction_cursor;
    }
  }

  const auto boxed = extract_boxed(result.text);
  if (!boxed) {
    throw RecordError("reconstruction lost the boxed final answer");
  }
  result.final_answer = *boxed;
  return result;
}

ReconstructionReport validate_reconstruction(std::string_view original,
                                             const ReconstructedCoT& result,
                                             const SplicePlan& plan,
                                             const Tokenizer& tokenizer) {
  ReconstructionReport report;

  std::size_t search_from = 0;
  for (const Span& span : plan.kept_spans) {
    const std::string_view slice = span.slice(original);
    const std::size_t pos = result.text.find(slice, search_from);
    if (pos == std::string::npos) {
      report.failures.push_back(
          "kept span [" + std::to_string(span.begin) + ", " + std::to_string(span.end) +
          ") does not appear verbatim in the reconstruction");
    } else {
      search_from = pos + slice.size();
    }
  }

  const auto original_answer = extract_boxed(original);
  if (!original_answer) {
    report.failures.push_back("original trace has no boxed answer");
  } else if (equivalent(result.final_answer, *original_answer).verdict !=
             Verdict::equivalent) {
    report.failures.push_back("final answer changed: '" + result.final_answer.raw +
                              "' vs original '" + original_answer->raw + "'");
  }

  const std::size_t budget = kBridgeTokenBudget * plan.junctions.size();
  const std::size_t original_tokens = tokenizer.count(original);
  const std::size_t result_tokens = tokenizer.count(result.text);
  if (result_tokens > original_tokens + budget) {
    report.failures.push_back(
        "token count " + std::to_string(result_tokens) + " exceeds original " +
        std::to_string(original_tokens) + " plus bridge budget " + std::to_string(budget));
  }

  report.pass = report.failures.empty();
  return report;
}

}  // namespace dlcot
