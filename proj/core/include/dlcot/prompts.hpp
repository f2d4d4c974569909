#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dlcot {

/// Sampling parameters for a chat-completion call. Pipeline calls default to
/// greedy settings; the teacher preset mirrors the parameters used to
/// generate long-trace corpora in the first place.
struct DecodingParams {
  double temperature = 0.0;
  double top_p = 1.0;
  std::optional<int> top_k;
  int max_new_tokens = 32768;

  static DecodingParams pipeline_defaults() { return {}; }
  static DecodingParams teacher_generation() {
    return DecodingParams{0.5, 0.5, 1, 32768};
  }

  /// Throws FatalError when a field is out of range.
  void validate() const;

  /// Canonical text rendering used in cache keys; stable across platforms.
  std::string canonical() const;
};

enum class TemplateId {
  macro_parse,
  approach_parse,
  verify_parse,
  redundancy_grade,
  coherence_rewrite,
};

const char* template_name(TemplateId id);

/// Slot names a template expects, in template order.
std::vector<std::string> template_slots(TemplateId id);

struct PromptRequest {
  TemplateId template_id = TemplateId::macro_parse;
  std::map<std::string, std::string> slots;
  std::optional<std::string> system_prompt;
  DecodingParams decoding = DecodingParams::pipeline_defaults();
  /// Validation feedback appended on a repair re-prompt. Part of the
  /// rendered text, so repairs never collide with the original cache entry.
  std::optional<std::string> correction;
};

/// Fills the template's input anchors from `slots`. Deterministic: identical
/// requests render to identical text. Throws FatalError when a slot is
/// missing or unused.
std::string render(const PromptRequest& request);

/// Default system prompt used by QwQ-style teachers; off unless configured.
extern const char* kQwqSystemPrompt;

}  // namespace dlcot
