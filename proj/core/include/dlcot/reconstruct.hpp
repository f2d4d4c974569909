#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dlcot/answer.hpp"
#include "dlcot/diagnostics.hpp"
#include "dlcot/gateway.hpp"
#include "dlcot/pruning.hpp"
#include "dlcot/structure.hpp"
#include "dlcot/tokenize.hpp"

namespace dlcot {

/// Connective inserted when a junction needs a bridge but none can be
/// generated (offline, over budget, or math-bearing output).
inline constexpr const char* kFallbackConnective = "Let me try another way.";

/// Token budget for one generated bridge.
inline constexpr std::size_t kBridgeTokenBudget = 60;

/// Kept spans of length above this always appear verbatim in the output
/// (they do regardless, since splicing is pure insertion; the constant pins
/// the validation contract).
inline constexpr std::size_t kJunctionEditWindow = 200;

struct Junction {
  std::size_t after_kept_index = 0;  // junction sits after kept_spans[i]
  Span removed;                      // original-text gap this junction bridges
};

struct SplicePlan {
  std::vector<Span> kept_spans;  // ordered, non-overlapping, original offsets
  std::vector<Junction> junctions;
};

/// Turns a pruning plan into kept spans over the original text plus the
/// junction list. The draft is the kept spans concatenated in order.
SplicePlan splice(std::string_view original, const PruningPlan& plan,
                  const MacroSegments& segments, const ApproachTree& tree,
                  const VerificationSet& verifications);

std::string splice_draft(std::string_view original, const SplicePlan& plan);

struct EditLogEntry {
  std::size_t junction_index = 0;
  std::string inserted;
};

struct ReconstructedCoT {
  std::string text;
  AnswerForm final_answer;
  std::vector<EditLogEntry> edit_log;
};

/// Request builder shared with fixture seeding.
PromptRequest bridge_request(std::string_view context_before,
                             std::string_view context_after);

/// Generates a transition for one junction: at most kBridgeTokenBudget
/// tokens and no digits or math operators absent from the surrounding
/// contexts. Junctions whose after-context already opens with a connective
/// cue get an empty bridge without a gateway call; generation failures fall
/// back to kFallbackConnective.
std::string bridge(std::string_view context_before, std::string_view context_after,
                   Gateway& gateway, Diagnostics& diag,
                   const std::string& record_id = "");

/// Splices and bridges in one step.
ReconstructedCoT reconstruct(std::string_view original, const PruningPlan& plan,
                             const MacroSegments& segments, const ApproachTree& tree,
                             const VerificationSet& verifications, Gateway& gateway,
                             Diagnostics& diag, const std::string& record_id = "");

struct ReconstructionReport {
  bool pass = false;
  std::vector<std::string> failures;
};

/// Checks kept-span verbatim presence, final-answer equivalence with the
/// original conclusion, and the token bound
///   tokens(result) <= tokens(original) - tokens(removed) + bridge budgets.
ReconstructionReport validate_reconstruction(std::string_view original,
                                             const ReconstructedCoT& result,
                                             const SplicePlan& plan,
                                             const Tokenizer& tokenizer);

}  // namespace dlcot
