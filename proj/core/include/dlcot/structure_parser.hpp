#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dlcot/diagnostics.hpp"
#include "dlcot/gateway.hpp"
#include "dlcot/record.hpp"
#include "dlcot/structure.hpp"

namespace dlcot {

/// Tuning for echo-to-original boundary location.
struct ParserOptions {
  std::size_t anchor_len = 40;       // characters compared at section edges
  double anchor_similarity = 0.90;   // acceptance threshold for fuzzy anchors
  int repair_budget = 1;             // re-prompts per record per stage
  std::size_t search_window = 2000;  // fuzzy scan radius around expected cut
};

/// Character-level similarity in [0,1]: 1 - levenshtein(a,b) / max(|a|,|b|).
double char_similarity(std::string_view a, std::string_view b);

/// Locates the cut points that partition `original` into one span per echoed
/// section, in order. The echoes are treated purely as boundary locators:
/// the LLM may have corrupted them, so each interior cut is pinned by exact
/// or fuzzy anchor matches (the tail of the preceding echo and the head of
/// the following echo), and whitespace between sections attaches to the
/// following section. The returned spans tile `original` by construction.
/// Throws RecordError when a boundary cannot be located or is ambiguous.
std::vector<Span> locate_section_spans(std::string_view original,
                                       const std::vector<std::string>& echo_bodies,
                                       const ParserOptions& options,
                                       Diagnostics& diag,
                                       const std::string& record_id = "");

/// One "## Heading" block of a parsed LLM echo, body trimmed of the
/// scaffolding blank lines markdown requires.
struct EchoBlock {
  std::string heading;
  std::string body;
  int level = 2;  // number of '#' on the heading line
};

struct ParsedEcho {
  std::vector<EchoBlock> blocks;
  std::vector<std::string> structure_footer;  // from "# Structure", may be empty
  bool has_structure_footer = false;
};

/// Splits a markdown echo into heading blocks plus the optional structure
/// footer array. Format errors surface later, when blocks are interpreted.
ParsedEcho parse_echo_markdown(const std::string& output);

// Request builders, shared by the pipeline and by fixture seeding so both
// sides derive identical cache keys.
PromptRequest macro_request(const CoTRecord& record);
PromptRequest approach_request(std::string_view approach_section_text);
PromptRequest verification_request(std::string_view solution_so_far,
                                   std::string_view verify_section_text);

/// Splits the trace into macro sections. The returned spans tile
/// record.solution_text exactly; the conclusion must contain a boxed answer.
MacroSegments segment_macro(const CoTRecord& record, Gateway& gateway,
                            Diagnostics& diag, const ParserOptions& options = {});

/// Splits the approach-exploration section into approaches and stages.
ApproachTree parse_approaches(const CoTRecord& record, const MacroSegments& segments,
                              Gateway& gateway, Diagnostics& diag,
                              const ParserOptions& options = {});

/// Splits the verify section into categorized items; an absent verify
/// section yields an empty set without a gateway call.
VerificationSet parse_verifications(const CoTRecord& record,
                                    const MacroSegments& segments, Gateway& gateway,
                                    Diagnostics& diag,
                                    const ParserOptions& options = {});

}  // namespace dlcot
