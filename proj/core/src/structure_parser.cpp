#include "dlcot/structure_parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "dlcot/answer.hpp"
#include "dlcot/errors.hpp"

namespace dlcot {

namespace {

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_ws(text[begin])) ++begin;
  while (end > begin && is_ws(text[end - 1])) --end;
  return std::string(text.substr(begin, end - begin));
}

std::string fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<std::size_t> find_occurrences(std::string_view haystack,
                                          std::string_view needle,
                                          std::size_t from, std::size_t cap = 64) {
  std::vector<std::size_t> positions;
  if (needle.empty()) return positions;
  std::size_t pos = from;
  while (positions.size() < cap) {
    pos = haystack.find(needle, pos);
    if (pos == std::string_view::npos) break;
    positions.push_back(pos);
    pos += 1;
  }
  return positions;
}

std::size_t back_off_whitespace(std::string_view text, std::size_t pos,
                                std::size_t floor) {
  while (pos > floor && is_ws(text[pos - 1])) --pos;
  return pos;
}

std::size_t skip_whitespace(std::string_view text, std::size_t pos) {
  while (pos < text.size() && is_ws(text[pos])) ++pos;
  return pos;
}

struct FuzzyHit {
  std::size_t pos = 0;
  double sim = 0.0;
};

// Seeds candidate alignments from exact 8-gram matches of the anchor, then
// scores a small neighborhood around each seed. Robust to paraphrase shifts
// without scanning every offset.
std::vector<FuzzyHit> fuzzy_find(std::string_view haystack, std::string_view needle,
                                 std::size_t lo, std::size_t hi, double threshold) {
  std::vector<FuzzyHit> hits;
  constexpr std::size_t kGram = 8;
  if (needle.size() < kGram || lo >= hi || hi > haystack.size()) return hits;

  std::set<std::size_t> evaluated;
  std::size_t budget = 512;
  for (std::size_t offset = 0; offset + kGram <= needle.size(); offset += kGram) {
    const std::string_view gram = needle.substr(offset, kGram);
    std::size_t from = lo;
    while (budget > 0) {
      const std::size_t p = haystack.find(gram, from);
      if (p == std::string_view::npos || p >= hi + offset) break;
      from = p + 1;
      if (p < offset) continue;
      const std::size_t anchor = p - offset;
      for (int d = -3; d <= 3; ++d) {
        if (d < 0 && anchor < static_cast<std::size_t>(-d)) continue;
        const std::size_t pos = anchor + d;
        if (pos < lo || pos >= hi) continue;
        if (!evaluated.insert(pos).second) continue;
        if (budget == 0) break;
        --budget;
        const std::string_view window =
            haystack.substr(pos, std::min(needle.size(), haystack.size() - pos));
        const double sim = char_similarity(needle, window);
        if (sim >= threshold) hits.push_back(FuzzyHit{pos, sim});
      }
    }
  }

  // Keep one hit per neighborhood: best similarity within 8 characters.
  std::sort(hits.begin(), hits.end(), [](const FuzzyHit& a, const FuzzyHit& b) {
    return a.pos < b.pos;
  });
  std::vector<FuzzyHit> merged;
  for (const FuzzyHit& hit : hits) {
    if (!merged.empty() && hit.pos - merged.back().pos <= 8) {
      if (hit.sim > merged.back().sim) merged.back() = hit;
    } else {
      merged.push_back(hit);
    }
  }
  return merged;
}

struct CutCandidate {
  std::size_t cut = 0;
  double confirmation = 0.0;  // similarity of the opposite-side anchor
};

double tail_similarity_at(std::string_view original, std::string_view tail,
                          std::size_t cut) {
  if (tail.empty()) return 1.0;
  const std::size_t take = std::min(tail.size(), cut);
  const std::string_view window = original.substr(cut - take, take);
  return char_similarity(tail.substr(tail.size() - take), window);
}

double head_similarity_at(std::string_view original, std::string_view head,
                          std::size_t cut) {
  if (head.empty()) return 1.0;
  const std::size_t start = skip_whitespace(original, cut);
  const std::string_view window =
      original.substr(start, std::min(head.size(), original.size() - start));
  return char_similarity(head, window);
}

void add_candidate(std::vector<CutCandidate>& candidates, std::size_t cut,
                   double confirmation) {
  for (auto& existing : candidates) {
    if (existing.cut == cut) {
      existing.confirmation = std::max(existing.confirmation, confirmation);
      return;
    }
  }
  candidates.push_back(CutCandidate{cut, confirmation});
}

}  // namespace

double char_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t rows = a.size() + 1;
  const std::size_t cols = b.size() + 1;
  std::vector<std::size_t> prev(cols), curr(cols);
  for (std::size_t j = 0; j < cols; ++j) prev[j] = j;
  for (std::size_t i = 1; i < rows; ++i) {
    curr[0] = i;
    for (std::size_t j = 1; j < cols; ++j) {
      const std::size_t cost = (a[i - 1] == b[j - 1]) ? 0 : 1;
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + cost});
    }
    std::swap(prev, curr);
  }
  const double distance = static_cast<double>(prev[cols - 1]);
  return 1.0 - distance / static_cast<double>(std::max(a.size(), b.size()));
}

std::vector<Span> locate_section_spans(std::string_view original,
                                       const std::vector<std::string>& echo_bodies,
                                       const ParserOptions& options,
                                       Diagnostics& diag,
                                       const std::string& record_id) {
  const std::size_t n = original.size();
  const std::size_t k = echo_bodies.size();
  if (k == 0) throw RecordError("no echoed sections to locate");
  if (n == 0) throw RecordError("original text is empty");

  std::vector<std::string> bodies;
  bodies.reserve(k);
  for (const auto& body : echo_bodies) {
    bodies.push_back(trim(body));
    if (bodies.back().empty()) {
      throw RecordError("echoed section body is empty");
    }
  }

  std::vector<std::size_t> cuts(k + 1, 0);
  cuts[k] = n;

  for (std::size_t i = 1; i < k; ++i) {
    const std::string& prev_body = bodies[i - 1];
    const std::string& next_body = bodies[i];
    const std::size_t floor = cuts[i - 1] + 1;
    if (floor >= n) {
      throw RecordError("ran out of original text while locating section " +
                        std::to_string(i));
    }
    const std::string_view head =
        std::string_view(next_body).substr(0, std::min(options.anchor_len, next_body.size()));
    const std::string_view tail = std::string_view(prev_body)
                                      .substr(prev_body.size() -
                                              std::min(options.anchor_len, prev_body.size()));
    const std::size_t expected = std::min(n - 1, cuts[i - 1] + prev_body.size());

    std::vector<CutCandidate> candidates;

    // Route 1: the next section's head echoed exactly.
    for (std::size_t p : find_occurrences(original, head, floor)) {
      std::size_t cut = back_off_whitespace(original, p, floor);
      if (cut < floor) cut = floor;
      add_candidate(candidates, cut, tail_similarity_at(original, tail, cut));
    }

    // Route 2: the previous section's tail echoed exactly.
    if (candidates.empty()) {
      const std::size_t tail_from = cuts[i - 1];
      for (std::size_t q : find_occurrences(original, tail, tail_from)) {
        const std::size_t cut = q + tail.size();
        if (cut < floor || cut >= n) continue;
        add_candidate(candidates, cut, head_similarity_at(original, head, cut));
      }
    }

    // Route 3/4: fuzzy anchors, windowed around the expected cut first.
    if (candidates.empty()) {
      const std::size_t lo = expected > options.search_window
                                 ? std::max(floor, expected - options.search_window)
                                 : floor;
      const std::size_t hi = std::min(n, expected + options.search_window);
      auto try_fuzzy = [&](std::size_t range_lo, std::size_t range_hi) {
        for (const FuzzyHit& hit :
             fuzzy_find(original, head, range_lo, range_hi, options.anchor_similarity)) {
          std::size_t cut = back_off_whitespace(original, hit.pos, floor);
          if (cut < floor) cut = floor;
          add_candidate(candidates, cut, hit.sim);
        }
        if (!candidates.empty()) return;
        for (const FuzzyHit& hit :
             fuzzy_find(original, tail, range_lo, range_hi, options.anchor_similarity)) {
          const std::size_t cut = hit.pos + tail.size();
          if (cut < floor || cut >= n) continue;
          add_candidate(candidates, cut, hit.sim);
        }
      };
      try_fuzzy(lo, hi);
      if (candidates.empty() && (lo > floor || hi < n)) {
        try_fuzzy(floor, n);
      }
    }

    if (candidates.empty()) {
      throw RecordError("cannot locate boundary before echoed section " +
                        std::to_string(i + 1) + " (anchors not found)");
    }

    std::size_t chosen = 0;
    if (candidates.size() == 1) {
      chosen = candidates[0].cut;
    } else {
      std::sort(candidates.begin(), candidates.end(),
                [](const CutCandidate& a, const CutCandidate& b) {
                  return a.confirmation > b.confirmation;
                });
      const bool best_confirmed = candidates[0].confirmation >= options.anchor_similarity;
      const bool runner_confirmed =
          candidates[1].confirmation >= options.anchor_similarity;
      if (best_confirmed && runner_confirmed &&
          candidates[0].confirmation - candidates[1].confirmation < 1e-9) {
        throw RecordError("boundary before echoed section " + std::to_string(i + 1) +
                          " is ambiguous (" + std::to_string(candidates.size()) +
                          " confirmed positions)");
      }
      if (!best_confirmed) {
        throw RecordError("boundary before echoed section " + std::to_string(i + 1) +
                          " is ambiguous (multiple unconfirmed positions)");
      }
      chosen = candidates[0].cut;
    }

    if (chosen <= cuts[i - 1] || chosen >= n) {
      throw RecordError("located boundary out of order before section " +
                        std::to_string(i + 1));
    }
    cuts[i] = chosen;
  }

  std::vector<Span> spans;
  spans.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    spans.push_back(Span{cuts[i], cuts[i + 1]});
  }

  // Weak-anchor diagnostics: the spans always tile, but report sections whose
  // echo disagrees with what was sliced.
  for (std::size_t i = 0; i < k; ++i) {
    const std::string_view slice = spans[i].slice(original);
    const std::string sliced = trim(slice);
    const std::string& body = bodies[i];
    const std::string_view body_head =
        std::string_view(body).substr(0, std::min(options.anchor_len, body.size()));
    const std::string_view slice_head = std::string_view(sliced).substr(
        0, std::min(options.anchor_len, sliced.size()));
    const double head_sim = char_similarity(body_head, slice_head);
    if (head_sim < options.anchor_similarity) {
      diag.emit(record_id, "",
                "section " + std::to_string(i + 1) +
                    " echo diverges from original near its start (similarity " +
                    std::to_string(head_sim) + ")");
    }
  }
  return spans;
}

ParsedEcho parse_echo_markdown(const std::string& output) {
  ParsedEcho echo;
  std::string footer_text;
  bool in_footer = false;
  EchoBlock* current = nullptr;
  std::string pending_body;

  auto flush_body = [&]() {
    if (current != nullptr) current->body = trim(pending_body);
    pending_body.clear();
  };

  std::size_t line_start = 0;
  while (line_start <= output.size()) {
    const std::size_t line_end = output.find('\n', line_start);
    const std::string_view line =
        std::string_view(output).substr(line_start, line_end == std::string::npos
                                                        ? output.size() - line_start
                                                        : line_end - line_start);
    line_start = (line_end == std::string::npos) ? output.size() + 1 : line_end + 1;

    if (!line.empty() && line[0] == '#') {
      std::size_t level = 0;
      while (level < line.size() && line[level] == '#') ++level;
      std::string heading = trim(line.substr(level));
      while (!heading.empty() && heading.back() == ':') heading.pop_back();
      heading = trim(heading);

      if (level == 1) {
        flush_body();
        current = nullptr;
        const std::string folded = fold(heading);
        if (folded.rfind("structure", 0) == 0) {
          in_footer = true;
          echo.has_structure_footer = true;
        } else {
          in_footer = false;  // "# Answer Split", "# Verify Split", ...
        }
        continue;
      }
      flush_body();
      in_footer = false;
      echo.blocks.push_back(EchoBlock{heading, "", static_cast<int>(level)});
      current = &echo.blocks.back();
      continue;
    }

    if (in_footer) {
      footer_text += std::string(line);
      footer_text += "\n";
    } else if (current != nullptr) {
      pending_body += std::string(line);
      pending_body += "\n";
    }
  }
  flush_body();

  // Footer array: ["a", "b", ...] with single or double quotes.
  const std::size_t open = footer_text.find('[');
  const std::size_t close = footer_text.find(']', open == std::string::npos ? 0 : open);
  if (open != std::string::npos && close != std::string::npos && close > open) {
    const std::string body = footer_text.substr(open + 1, close - open - 1);
    std::size_t pos = 0;
    while (pos < body.size()) {
      const char quote = body[pos];
      if (quote == '"' || quote == '\'') {
        const std::size_t end = body.find(quote, pos + 1);
        if (end == std::string::npos) break;
        echo.structure_footer.push_back(body.substr(pos + 1, end - pos - 1));
        pos = end + 1;
      } else {
        ++pos;
      }
    }
  }
  return echo;
}

PromptRequest macro_request(const CoTRecord& record) {
  PromptRequest request;
  request.template_id = TemplateId::macro_parse;
  request.slots["solution"] = record.solution_text;
  return request;
}

PromptRequest approach_request(std::string_view approach_section_text) {
  PromptRequest request;
  request.template_id = TemplateId::approach_parse;
  request.slots["solution"] = std::string(approach_section_text);
  return request;
}

PromptRequest verification_request(std::string_view solution_so_far,
                                   std::string_view verify_section_text) {
  PromptRequest request;
  request.template_id = TemplateId::verify_parse;
  request.slots["solution"] = std::string(solution_so_far);
  request.slots["reflection"] = std::string(verify_section_text);
  return request;
}

namespace {

// Runs builder over the completion, re-prompting once with the validation
// failure appended when the first echo does not interpret cleanly. A missing
// fixture on the first call is fatal (the replay store is incomplete); on a
// repair call it downgrades to a record failure, since repairs cannot be
// replayed offline.
template <typename Builder>
auto complete_with_repair(Gateway& gateway, PromptRequest request,
                          const ParserOptions& options, Diagnostics& diag,
                          const std::string& record_id, const char* stage,
                          Builder&& builder) {
  std::string failure;
  for (int attempt = 0; attempt <= options.repair_budget; ++attempt) {
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
      return builder(result.text);
    } catch (const RecordError& e) {
      failure = e.what();
      if (attempt < options.repair_budget) {
        diag.emit(record_id, stage, failure + "; re-prompting");
      }
    }
  }
  throw RecordError(std::string(stage) + " failed after repair: " + failure);
}

MacroSegments build_macro_segments(const CoTRecord& record, const std::string& echo_text,
                                   const ParserOptions& options, Diagnostics& diag) {
  const ParsedEcho echo = parse_echo_markdown(echo_text);

  std::vector<std::pair<MacroSection, std::string>> sections;
  for (const EchoBlock& block : echo.blocks) {
    if (block.level != 2) continue;
    const auto section = macro_section_from_name(block.heading);
    if (!section) {
      throw RecordError("unknown macro section heading: " + block.heading);
    }
    for (const auto& [existing, body] : sections) {
      if (existing == *section) {
        throw RecordError(std::string("duplicate macro section: ") + block.heading);
      }
    }
    if (block.body.empty()) {
      throw RecordError("macro section has empty body: " + block.heading);
    }
    sections.emplace_back(*section, block.body);
  }
  if (sections.empty()) {
    throw RecordError("macro echo contains no section headings");
  }
  for (std::size_t i = 1; i < sections.size(); ++i) {
    if (static_cast<int>(sections[i].first) <= static_cast<int>(sections[i - 1].first)) {
      throw RecordError("macro sections out of canonical order");
    }
  }
  auto has_section = [&](MacroSection s) {
    for (const auto& [section, body] : sections) {
      if (section == s) return true;
    }
    return false;
  };
  if (!has_section(MacroSection::question_repeat)) {
    throw RecordError("macro echo missing required Question_Repeat section");
  }
  if (!has_section(MacroSection::conclusion)) {
    throw RecordError("macro echo missing required Conclusion section");
  }

  if (echo.has_structure_footer) {
    std::vector<MacroSection> footer_sections;
    bool footer_ok = true;
    for (const auto& name : echo.structure_footer) {
      const auto section = macro_section_from_name(name);
      if (!section) {
        footer_ok = false;
        break;
      }
      footer_sections.push_back(*section);
    }
    std::vector<MacroSection> heading_sections;
    for (const auto& [section, body] : sections) heading_sections.push_back(section);
    if (!footer_ok || footer_sections != heading_sections) {
      diag.emit(record.id, "segmented",
                "structure footer disagrees with headings; using headings");
    }
  } else {
    diag.emit(record.id, "segmented", "structure footer missing; using headings");
  }

  std::vector<std::string> bodies;
  bodies.reserve(sections.size());
  for (const auto& [section, body] : sections) bodies.push_back(body);

  const std::vector<Span> spans =
      locate_section_spans(record.solution_text, bodies, options, diag, record.id);

  MacroSegments segments;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    segments.entries.push_back(MacroSegments::Entry{sections[i].first, spans[i]});
  }

  const auto conclusion = segments.find(MacroSection::conclusion);
  if (!extract_boxed(conclusion->slice(record.solution_text)).has_value()) {
    throw RecordError("conclusion section contains no boxed final answer");
  }
  return segments;
}

}  // namespace

MacroSegments segment_macro(const CoTRecord& record, Gateway& gateway,
                            Diagnostics& diag, const ParserOptions& options) {
  if (record.solution_text.empty()) {
    throw RecordError("record has empty solution_text");
  }
  return complete_with_repair(
      gateway, macro_request(record), options, diag, record.id, "segment_macro",
      [&](const std::string& echo_text) {
        return build_macro_segments(record, echo_text, options, diag);
      });
}

namespace {

std::optional<int> approach_index_from_heading(std::string_view heading) {
  const std::string folded = fold(heading);
  std::string_view rest;
  if (folded.rfind("approach", 0) == 0) {
    rest = std::string_view(folded).substr(8);
  } else if (folded.rfind("solution", 0) == 0) {
    rest = std::string_view(folded).substr(8);
  } else {
    return std::nullopt;
  }
  while (!rest.empty() && (rest.front() == ' ' || rest.front() == '_')) {
    rest.remove_prefix(1);
  }
  if (rest.empty()) return std::nullopt;
  int value = 0;
  for (char c : rest) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

ApproachTree build_approach_tree(const CoTRecord& record, const Span& section,
                                 const std::string& echo_text,
                                 const ParserOptions& options, Diagnostics& diag) {
  const ParsedEcho echo = parse_echo_markdown(echo_text);

  struct RawApproach {
    int echo_index = 0;
    std::vector<std::pair<std::string, std::string>> stages;  // name -> body
  };
  std::vector<RawApproach> raw;

  for (const EchoBlock& block : echo.blocks) {
    if (block.level == 2) {
      const auto index = approach_index_from_heading(block.heading);
      if (!index) {
        throw RecordError("unrecognized approach heading: " + block.heading);
      }
      raw.push_back(RawApproach{*index, {}});
      if (!block.body.empty()) {
        raw.back().stages.emplace_back("Main", block.body);
        diag.emit(record.id, "parsed",
                  "approach " + std::to_string(*index) +
                      " has text outside stage headings; kept as stage 'Main'");
      }
    } else if (block.level >= 3) {
      if (raw.empty()) {
        throw RecordError("stage heading appears before any approach heading: " +
                          block.heading);
      }
      if (block.body.empty()) {
        throw RecordError("stage has empty body: " + block.heading);
      }
      raw.back().stages.emplace_back(block.heading, block.body);
    }
  }

  if (raw.empty()) {
    throw RecordError("approach echo contains no approach headings");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].stages.empty()) {
      throw RecordError("approach " + std::to_string(raw[i].echo_index) +
                        " has no stages");
    }
    if (raw[i].echo_index != static_cast<int>(i) + 1) {
      diag.emit(record.id, "parsed",
                "approach numbering in echo is not contiguous; renumbering");
    }
  }

  std::vector<std::string> bodies;
  for (const auto& approach : raw) {
    for (const auto& [name, body] : approach.stages) bodies.push_back(body);
  }

  const std::string_view section_text = section.slice(record.solution_text);
  const std::vector<Span> spans =
      locate_section_spans(section_text, bodies, options, diag, record.id);

  ApproachTree tree;
  std::size_t flat = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Approach approach;
    approach.index = static_cast<int>(i) + 1;
    for (const auto& [name, body] : raw[i].stages) {
      const Span local = spans[flat++];
      approach.stages.push_back(ApproachStage{
          name, Span{section.begin + local.begin, section.begin + local.end}});
    }
    tree.approaches.push_back(std::move(approach));
  }
  return tree;
}

VerificationSet build_verification_set(const CoTRecord& record, const Span& section,
                                       const std::string& echo_text,
                                       const ParserOptions& options,
                                       Diagnostics& diag) {
  const ParsedEcho echo = parse_echo_markdown(echo_text);

  std::vector<std::pair<std::string, std::string>> raw;  // category -> body
  for (const EchoBlock& block : echo.blocks) {
    if (block.level != 2) continue;
    if (block.body.empty()) {
      throw RecordError("verification item has empty body: " + block.heading);
    }
    raw.emplace_back(block.heading, block.body);
  }
  if (raw.empty()) {
    throw RecordError("verification echo contains no category headings");
  }

  std::vector<std::string> bodies;
  for (const auto& [category, body] : raw) bodies.push_back(body);

  const std::string_view section_text = section.slice(record.solution_text);
  const std::vector<Span> spans =
      locate_section_spans(section_text, bodies, options, diag, record.id);

  VerificationSet set;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    VerificationItem item;
    item.category = raw[i].first;
    item.flag = verification_flag_from_category(item.category);
    item.span = Span{section.begin + spans[i].begin, section.begin + spans[i].end};
    set.items.push_back(std::move(item));
  }
  return set;
}

}  // namespace

ApproachTree parse_approaches(const CoTRecord& record, const MacroSegments& segments,
                              Gateway& gateway, Diagnostics& diag,
                              const ParserOptions& options) {
  const auto section = segments.find(MacroSection::approach_explore);
  if (!section || section->empty()) {
    throw RecordError("record has no approach exploration section to parse");
  }
  const std::string_view section_text = section->slice(record.solution_text);
  return complete_with_repair(
      gateway, approach_request(section_text), options, diag, record.id,
      "parse_approaches", [&](const std::string& echo_text) {
        return build_approach_tree(record, *section, echo_text, options, diag);
      });
}

VerificationSet parse_verifications(const CoTRecord& record,
                                    const MacroSegments& segments, Gateway& gateway,
                                    Diagnostics& diag, const ParserOptions& options) {
  const auto section = segments.find(MacroSection::verify);
  if (!section || section->empty()) {
    return VerificationSet{};  // absent verify section is not an error
  }
  const std::string_view solution_so_far =
      std::string_view(record.solution_text).substr(0, section->begin);
  const std::string_view verify_text = section->slice(record.solution_text);
  return complete_with_repair(
      gateway, verification_request(solution_so_far, verify_text), options, diag,
      record.id, "parse_verifications", [&](const std::string& echo_text) {
        return build_verification_set(record, *section, echo_text, options, diag);
      });
}

}  // namespace dlcot
