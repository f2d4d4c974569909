#include "dlcot/grading.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "dlcot/errors.hpp"
#include "dlcot/structure_parser.hpp"

namespace dlcot {

namespace {

std::string fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

// Case-insensitive find; fold preserves length so indices line up.
std::size_t ifind(const std::string& folded_haystack, std::string_view needle,
                  std::size_t from = 0) {
  return folded_haystack.find(fold(needle), from);
}

std::string tag_content(const std::string& body, const std::string& folded,
                        const char* open_tag, const char* close_tag) {
  const std::size_t open = ifind(folded, open_tag);
  if (open == std::string::npos) return "";
  const std::size_t start = open + std::string_view(open_tag).size();
  const std::size_t close = ifind(folded, close_tag, start);
  if (close == std::string::npos) return "";
  return trim(body.substr(start, close - start));
}

std::string segment_after(const std::string& body, const std::string& folded,
                          const char* marker,
                          const std::vector<const char*>& terminators) {
  const std::size_t pos = ifind(folded, marker);
  if (pos == std::string::npos) return "";
  const std::size_t start = pos + std::string_view(marker).size();
  std::size_t end = body.size();
  for (const char* terminator : terminators) {
    const std::size_t t = ifind(folded, terminator, start);
    if (t != std::string::npos) end = std::min(end, t);
  }
  return trim(body.substr(start, end - start));
}

std::optional<int> solution_number(std::string_view heading) {
  const std::string folded = fold(heading);
  if (folded.rfind("solution", 0) != 0) return std::nullopt;
  std::string_view rest = std::string_view(folded).substr(8);
  while (!rest.empty() && (rest.front() == ' ' || rest.front() == '_')) {
    rest.remove_prefix(1);
  }
  if (rest.empty()) return std::nullopt;
  int value = 0;
  for (char c : rest) {
    if (c < '0' || c > '9') break;  // tolerate "Solution 2 (revised)" suffixes
    value = value * 10 + (c - '0');
  }
  return value > 0 ? std::optional<int>(value) : std::nullopt;
}

void locate_quotes(const std::string& quoted_segment, const std::string& approach_text,
                   StrategyLabel& label, Diagnostics& diag,
                   const std::string& record_id, int solution_index) {
  auto try_locate = [&](const std::string& quote) {
    if (quote.empty()) return false;
    const std::size_t pos = approach_text.find(quote);
    if (pos == std::string::npos) return false;
    label.error_spans.push_back(ErrorSpan{quote, pos, pos + quote.size()});
    return true;
  };

  const std::string whole = trim(quoted_segment);
  if (whole.empty() || fold(whole) == "none") return;
  if (try_locate(whole)) return;

  // The grader sometimes quotes several disjoint steps; fall back to
  // per-line location before giving up.
  bool any = false;
  std::size_t start = 0;
  while (start <= whole.size()) {
    const std::size_t nl = whole.find('\n', start);
    const std::string line =
        trim(whole.substr(start, nl == std::string::npos ? whole.size() - start
                                                         : nl - start));
    if (!line.empty()) {
      if (try_locate(line)) {
        any = true;
      } else {
        diag.emit(record_id, "analyzed",
                  "solution " + std::to_string(solution_index) +
                      ": quoted erroneous part is not a substring of the "
                      "approach, span dropped: \"" +
                      line.substr(0, 60) + (line.size() > 60 ? "...\"" : "\""));
      }
    }
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  (void)any;
}

}  // namespace

const char* completeness_name(Completeness value) {
  switch (value) {
    case Completeness::correct: return "Correct";
    case Completeness::incorrect: return "Incorrect";
    case Completeness::incomplete: return "Incomplete";
  }
  return "Unknown";
}

Completeness completeness_from_name(std::string_view name) {
  const std::string folded = fold(trim(name));
  if (folded == "correct") return Completeness::correct;
  if (folded == "incorrect") return Completeness::incorrect;
  if (folded == "incomplete") return Completeness::incomplete;
  throw RecordError("unrecognized completeness label: " + std::string(name));
}

nlohmann::json label_to_json(const StrategyLabel& label) {
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& span : label.error_spans) {
    spans.push_back({{"quote", span.quote}, {"begin", span.begin}, {"end", span.end}});
  }
  return nlohmann::json{{"completeness", completeness_name(label.completeness)},
                        {"has_derivation_error", label.has_derivation_error},
                        {"error_spans", spans},
                        {"explanation", label.explanation}};
}

StrategyLabel label_from_json(const nlohmann::json& j) {
  StrategyLabel label;
  label.completeness = completeness_from_name(j.at("completeness").get<std::string>());
  label.has_derivation_error = j.at("has_derivation_error").get<bool>();
  label.explanation = j.value("explanation", std::string{});
  for (const auto& span : j.at("error_spans")) {
    label.error_spans.push_back(ErrorSpan{span.at("quote").get<std::string>(),
                                          span.at("begin").get<std::size_t>(),
                                          span.at("end").get<std::size_t>()});
  }
  return label;
}

PromptRequest grade_request(std::string_view question, std::string_view gold_answer,
                            const std::vector<std::string>& approach_texts) {
  PromptRequest request;
  request.template_id = TemplateId::redundancy_grade;
  request.slots["question"] = std::string(question);
  request.slots["standard_solution"] =
      "The final answer is \\boxed{" + std::string(gold_answer) + "}.";
  std::string solutions;
  for (std::size_t i = 0; i < approach_texts.size(); ++i) {
    solutions += "## Solution " + std::to_string(i + 1) + "\n\n";
    solutions += approach_texts[i];
    solutions += "\n\n";
  }
  request.slots["solutions"] = solutions;
  return request;
}

std::vector<StrategyLabel> parse_grader_output(
    const std::string& output, const std::vector<std::string>& approach_texts,
    Diagnostics& diag, const std::string& record_id) {
  const ParsedEcho echo = parse_echo_markdown(output);

  std::map<int, std::string> blocks;
  for (const EchoBlock& block : echo.blocks) {
    if (block.level != 2) continue;
    if (const auto number = solution_number(block.heading)) {
      blocks[*number] = block.body;
    }
  }

  std::vector<StrategyLabel> labels;
  for (std::size_t i = 0; i < approach_texts.size(); ++i) {
    const int index = static_cast<int>(i) + 1;
    const auto it = blocks.find(index);
    if (it == blocks.end()) {
      throw RecordError("grader output has no block for solution " +
                        std::to_string(index));
    }
    const std::string& body = it->second;
    const std::string folded = fold(body);

    StrategyLabel label;
    const std::string label1 = tag_content(body, folded, "<label1>", "</label1>");
    if (label1.empty()) {
      throw RecordError("grader output missing <label1> for solution " +
                        std::to_string(index));
    }
    label.completeness = completeness_from_name(label1);

    const std::string label2 = tag_content(body, folded, "<label2>", "</label2>");
    if (label2.empty()) {
      throw RecordError("grader output missing <label2> for solution " +
                        std::to_string(index));
    }
    const std::string folded2 = fold(label2);
    if (folded2.find("no calculation") != std::string::npos) {
      label.has_derivation_error = false;
    } else if (folded2.find("calculation and derivation error") != std::string::npos) {
      label.has_derivation_error = true;
    } else {
      throw RecordError("unrecognized <label2> value for solution " +
                        std::to_string(index) + ": " + label2);
    }

    const std::string explanation1 = segment_after(
        body, folded, "explanation for label1:",
        {"<label2>", "explanation for label2:", "quoted erroneous parts:"});
    const std::string explanation2 = segment_after(
        body, folded, "explanation for label2:", {"quoted erroneous parts:"});
    label.explanation = explanation1;
    if (!explanation2.empty()) {
      if (!label.explanation.empty()) label.explanation += "\n";
      label.explanation += explanation2;
    }

    if (label.has_derivation_error) {
      const std::string quoted = segment_after(body, folded,
                                               "quoted erroneous parts:", {});
      locate_quotes(quoted, approach_texts[i], label, diag, record_id, index);
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

std::vector<StrategyLabel> grade(std::string_view question,
                                 std::string_view gold_answer,
                                 const std::vector<std::string>& approach_texts,
                                 Gateway& gateway, Diagnostics& diag,
                                 const std::string& record_id, int repair_budget) {
  if (approach_texts.empty()) {
    throw RecordError("grade: no approaches to evaluate");
  }
  PromptRequest request = grade_request(question, gold_answer, approach_texts);
  std::string failure;
  for (int attempt = 0; attempt <= repair_budget; ++attempt) {
    if (attempt > 0) request.correction = failure;
    CompletionResult result;
    try {
      result = gateway.complete(request);
    } catch (const MissingFixtureError& e) {
      if (attempt == 0) throw;
      throw RecordError(std::string("repair re-prompt has no offline fixture (") +
                        e.what() + ")");
    }
    try {
      return parse_grader_output(result.text, approach_texts, diag, record_id);
    } catch (const RecordError& e) {
      failure = e.what();
      if (attempt < repair_budget) {
        diag.emit(record_id, "analyzed", failure + "; re-prompting grader");
      }
    }
  }
  throw RecordError("grading failed after repair: " + failure);
}

AuditReport audit_labels(const std::vector<StrategyLabel>& labels,
                         const std::vector<std::string>& approach_texts,
                         const AnswerForm& gold_answer) {
  AuditReport report;
  for (std::size_t i = 0; i < labels.size() && i < approach_texts.size(); ++i) {
    const StrategyLabel& label = labels[i];
    if (label.completeness == Completeness::correct) {
      const auto boxed = extract_boxed(approach_texts[i]);
      if (!boxed) {
        report.flags.push_back("approach " + std::to_string(i + 1) +
                               " labeled Correct but has no extractable boxed answer");
      } else if (equivalent(*boxed, gold_answer).verdict != Verdict::equivalent) {
        report.flags.push_back("approach " + std::to_string(i + 1) +
                               " labeled Correct but its answer '" + boxed->raw +
                               "' is not equivalent to gold '" + gold_answer.raw + "'");
      }
    }
    for (const auto& span : label.error_spans) {
      if (span.end > approach_texts[i].size() ||
          approach_texts[i].compare(span.begin, span.end - span.begin, span.quote) != 0) {
        report.flags.push_back("approach " + std::to_string(i + 1) +
                               " has an error span that does not slice back to its quote");
      }
    }
  }
  return report;
}

}  // namespace dlcot
