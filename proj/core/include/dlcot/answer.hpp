#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dlcot/diagnostics.hpp"

namespace dlcot {

enum class AnswerKind { integer, rational, decimal, expression };

const char* answer_kind_name(AnswerKind kind);

/// A final answer in raw and canonical form. Numeric kinds carry an exact
/// reduced fraction; decimals are parsed as exact rationals, never floats,
/// so "109.2" and "\frac{546}{5}" compare equal without tolerances.
struct AnswerForm {
  std::string raw;
  std::string normalized;
  AnswerKind kind = AnswerKind::expression;
  long long numerator = 0;   // valid for numeric kinds, sign lives here
  long long denominator = 1; // always > 0 for numeric kinds

  bool is_numeric() const { return kind != AnswerKind::expression; }
};

/// Deterministic canonical text: whitespace stripped, \left/\right dropped,
/// \dfrac-family mapped to \frac, \frac arguments rebraced, redundant brace
/// nesting collapsed, trailing sentence punctuation removed.
std::string normalize_answer_text(std::string_view raw);

AnswerForm make_answer_form(std::string_view raw);

/// Content of the last balanced \boxed{...} in `text`; nullopt when no boxed
/// answer exists. Unbalanced boxed groups are skipped with a diagnostic.
std::optional<AnswerForm> extract_boxed(std::string_view text,
                                        Diagnostics* diag = nullptr);

/// Parses a gold-answer field: uses the boxed content when present,
/// otherwise the whole text.
AnswerForm answer_from_text(std::string_view text);

enum class Verdict { equivalent, different, undecidable };

const char* verdict_name(Verdict verdict);

struct EquivalenceResult {
  Verdict verdict = Verdict::undecidable;
  std::string reason;
};

/// Total function. Numeric forms compare by exact rational arithmetic;
/// expressions compare by canonical text (with commutative reordering of
/// '='-free comma lists); everything else is undecidable, which callers
/// that filter corpora treat as a rejection.
EquivalenceResult equivalent(const AnswerForm& a, const AnswerForm& b);

inline bool is_equivalent(const AnswerForm& a, const AnswerForm& b) {
  return equivalent(a, b).verdict == Verdict::equivalent;
}

}  // namespace dlcot
