#include "dlcot/answer.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <vector>

namespace dlcot {

namespace {

bool is_space_char(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_digit_char(char c) { return c >= '0' && c <= '9'; }

void replace_all(std::string& text, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// End offset (one past '}') of a balanced group starting at the '{' at
// `open`, honoring backslash-escaped braces. npos when unbalanced.
std::size_t balanced_group_end(std::string_view text, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\\' && i + 1 < text.size() && (text[i + 1] == '{' || text[i + 1] == '}')) {
      ++i;
      continue;
    }
    if (c == '{') ++depth;
    if (c == '}') {
      --depth;
      if (depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

// Rewrites \frac arguments to braced form: "\frac12" and "\frac 1 2"
// both become "\frac{1}{2}".
std::string rebrace_frac(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, 5, "\\frac") == 0 &&
        (i + 5 >= text.size() || !std::isalpha(static_cast<unsigned char>(text[i + 5])))) {
      out += "\\frac";
      i += 5;
      for (int arg = 0; arg < 2; ++arg) {
        while (i < text.size() && is_space_char(text[i])) ++i;
        if (i >= text.size()) break;
        if (text[i] == '{') {
          const std::size_t end = balanced_group_end(text, i);
          if (end == std::string_view::npos) break;
          out.append(text, i, end - i);
          i = end;
        } else if (text[i] == '\\') {
          std::size_t j = i + 1;
          while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
          out += '{';
          out.append(text, i, j - i);
          out += '}';
          i = j;
        } else {
          out += '{';
          out += text[i];
          out += '}';
          ++i;
        }
      }
    } else {
      out += text[i];
      ++i;
    }
  }
  return out;
}

// Collapses {{X}} to {X} at every nesting level.
std::string collapse_redundant_braces(const std::string& text) {
  std::string current = text;
  for (int pass = 0; pass < 8; ++pass) {
    std::string next;
    next.reserve(current.size());
    bool changed = false;
    std::size_t i = 0;
    while (i < current.size()) {
      if (current[i] == '{') {
        const std::size_t end = balanced_group_end(current, i);
        if (end != std::string_view::npos && end - i >= 4 && current[i + 1] == '{' &&
            balanced_group_end(current, i + 1) == end - 1) {
          next += current.substr(i + 1, end - i - 2);
          i = end;
          changed = true;
          continue;
        }
      }
      next += current[i];
      ++i;
    }
    current = std::move(next);
    if (!changed) break;
  }
  return current;
}

struct Rational {
  long long num = 0;
  long long den = 1;
};

std::optional<long long> checked_mul(long long a, long long b) {
  const __int128 r = static_cast<__int128>(a) * b;
  if (r > std::numeric_limits<long long>::max() ||
      r < std::numeric_limits<long long>::min()) {
    return std::nullopt;
  }
  return static_cast<long long>(r);
}

std::optional<Rational> reduce(long long num, long long den) {
  if (den == 0) return std::nullopt;
  if (den < 0) {
    if (num == std::numeric_limits<long long>::min() ||
        den == std::numeric_limits<long long>::min()) {
      return std::nullopt;
    }
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

std::optional<long long> parse_ll(std::string_view digits) {
  if (digits.empty() || digits.size() > 18) return std::nullopt;
  long long value = 0;
  for (char c : digits) {
    if (!is_digit_char(c)) return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

bool split_sign(std::string_view& text, bool& negative) {
  negative = false;
  while (!text.empty() && (text.front() == '+' || text.front() == '-')) {
    if (text.front() == '-') negative = !negative;
    text.remove_prefix(1);
  }
  return !text.empty();
}

std::optional<Rational> parse_integer(std::string_view text) {
  bool negative = false;
  if (!split_sign(text, negative)) return std::nullopt;
  if (!std::all_of(text.begin(), text.end(), is_digit_char)) return std::nullopt;
  const auto value = parse_ll(text);
  if (!value) return std::nullopt;
  return Rational{negative ? -*value : *value, 1};
}

std::optional<Rational> parse_decimal(std::string_view text) {
  bool negative = false;
  if (!split_sign(text, negative)) return std::nullopt;
  const std::size_t dot = text.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = text.substr(dot + 1);
  if (frac.empty() || whole.size() + frac.size() == 0) return std::nullopt;
  if (!std::all_of(whole.begin(), whole.end(), is_digit_char) ||
      !std::all_of(frac.begin(), frac.end(), is_digit_char)) {
    return std::nullopt;
  }
  const auto whole_value = whole.empty() ? std::optional<long long>(0) : parse_ll(whole);
  const auto frac_value = parse_ll(frac);
  if (!whole_value || !frac_value) return std::nullopt;
  long long den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) {
    const auto scaled = checked_mul(den, 10);
    if (!scaled) return std::nullopt;
    den = *scaled;
  }
  const auto scaled_whole = checked_mul(*whole_value, den);
  if (!scaled_whole) return std::nullopt;
  long long num = *scaled_whole + *frac_value;
  if (negative) num = -num;
  return reduce(num, den);
}

// Accepts "\frac{p}{q}" and "p/q" (with optional leading sign).
std::optional<Rational> parse_fraction(std::string_view text) {
  bool negative = false;
  if (!split_sign(text, negative)) return std::nullopt;

  std::optional<Rational> numerator;
  std::optional<Rational> denominator;
  if (text.rfind("\\frac{", 0) == 0) {
    const std::size_t num_open = 5;
    const std::size_t num_end = balanced_group_end(text, num_open);
    if (num_end == std::string_view::npos || num_end >= text.size() ||
        text[num_end] != '{') {
      return std::nullopt;
    }
    const std::size_t den_end = balanced_group_end(text, num_end);
    if (den_end == std::string_view::npos || den_end != text.size()) {
      return std::nullopt;
    }
    const std::string_view num_text = text.substr(num_open + 1, num_end - num_open - 2);
    const std::string_view den_text = text.substr(num_end + 1, den_end - num_end - 2);
    numerator = parse_integer(num_text);
    denominator = parse_integer(den_text);
  } else {
    const std::size_t slash = text.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    numerator = parse_integer(text.substr(0, slash));
    denominator = parse_integer(text.substr(slash + 1));
  }
  if (!numerator || !denominator || denominator->num == 0) return std::nullopt;
  long long num = numerator->num;
  if (negative) num = -num;
  return reduce(num, denominator->num);
}

std::optional<Rational> to_rational(const AnswerForm& form) {
  if (!form.is_numeric()) return std::nullopt;
  return Rational{form.numerator, form.denominator};
}

bool rationals_equal(const Rational& a, const Rational& b) {
  // Both reduced with positive denominators.
  return a.num == b.num && a.den == b.den;
}

// Splits on commas at brace/bracket/paren depth zero.
std::vector<std::string_view> split_top_level_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '{' || c == '[' || c == '(') ++depth;
    if (c == '}' || c == ']' || c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(text.substr(start));
  return parts;
}

bool has_top_level_equals(std::string_view text) {
  int depth = 0;
  for (char c : text) {
    if (c == '{' || c == '[' || c == '(') ++depth;
    if (c == '}' || c == ']' || c == ')') --depth;
    if (c == '=' && depth == 0) return true;
  }
  return false;
}

// Canonical comparison key for one comma-list element.
std::string element_key(std::string_view element, bool& numeric) {
  const AnswerForm form = make_answer_form(element);
  if (form.is_numeric()) {
    numeric = true;
    return std::to_string(form.numerator) + "/" + std::to_string(form.denominator);
  }
  numeric = false;
  return "expr:" + form.normalized;
}

}  // namespace

const char* answer_kind_name(AnswerKind kind) {
  switch (kind) {
    case AnswerKind::integer: return "integer";
    case AnswerKind::rational: return "rational";
    case AnswerKind::decimal: return "decimal";
    case AnswerKind::expression: return "expression";
  }
  return "unknown";
}

const char* verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::equivalent: return "equivalent";
    case Verdict::different: return "different";
    case Verdict::undecidable: return "undecidable";
  }
  return "unknown";
}

std::string normalize_answer_text(std::string_view raw) {
  std::string text(raw);
  replace_all(text, "\\dfrac", "\\frac");
  replace_all(text, "\\tfrac", "\\frac");
  replace_all(text, "\\cfrac", "\\frac");
  replace_all(text, "\\left", "");
  replace_all(text, "\\right", "");
  text = rebrace_frac(text);

  std::string compact;
  compact.reserve(text.size());
  for (char c : text) {
    if (!is_space_char(c)) compact += c;
  }

  compact = collapse_redundant_braces(compact);

  while (!compact.empty() && (compact.back() == '.' || compact.back() == ',')) {
    // Keep a terminating digit's decimal point intact: only strip when the
    // dot cannot be part of a number ("42." still strips, "109.2" is safe
    // because the last char is a digit).
    compact.pop_back();
  }
  return compact;
}

AnswerForm make_answer_form(std::string_view raw) {
  AnswerForm form;
  form.raw = std::string(raw);
  form.normalized = normalize_answer_text(raw);

  if (auto r = parse_integer(form.normalized)) {
    form.kind = AnswerKind::integer;
    form.numerator = r->num;
    form.denominator = r->den;
    return form;
  }
  if (auto r = parse_decimal(form.normalized)) {
    form.kind = AnswerKind::decimal;
    form.numerator = r->num;
    form.denominator = r->den;
    return form;
  }
  if (auto r = parse_fraction(form.normalized)) {
    form.kind = AnswerKind::rational;
    form.numerator = r->num;
    form.denominator = r->den;
    return form;
  }
  form.kind = AnswerKind::expression;
  return form;
}

std::optional<AnswerForm> extract_boxed(std::string_view text, Diagnostics* diag) {
  static constexpr std::string_view kBoxed = "\\boxed";
  std::optional<AnswerForm> result;
  bool saw_unbalanced = false;

  std::size_t pos = 0;
  while ((pos = text.find(kBoxed, pos)) != std::string_view::npos) {
    std::size_t open = pos + kBoxed.size();
    while (open < text.size() && is_space_char(text[open])) ++open;
    if (open >= text.size() || text[open] != '{') {
      pos += kBoxed.size();
      continue;
    }
    const std::size_t end = balanced_group_end(text, open);
    if (end == std::string_view::npos) {
      saw_unbalanced = true;
      pos = open + 1;
      continue;
    }
    result = make_answer_form(text.substr(open + 1, end - open - 2));
    pos = end;
  }

  if (saw_unbalanced && diag != nullptr) {
    diag->emit("unbalanced braces in \\boxed{...} group");
  }
  return result;
}

AnswerForm answer_from_text(std::string_view text) {
  if (auto boxed = extract_boxed(text)) return *boxed;
  return make_answer_form(text);
}

EquivalenceResult equivalent(const AnswerForm& a, const AnswerForm& b) {
  const auto ra = to_rational(a);
  const auto rb = to_rational(b);
  if (ra && rb) {
    if (rationals_equal(*ra, *rb)) {
      return {Verdict::equivalent,
              "exact rational values agree (" + std::to_string(ra->num) + "/" +
                  std::to_string(ra->den) + ")"};
    }
    return {Verdict::different,
            "exact rational values differ (" + std::to_string(ra->num) + "/" +
                std::to_string(ra->den) + " vs " + std::to_string(rb->num) + "/" +
                std::to_string(rb->den) + ")"};
  }

  if (a.is_numeric() != b.is_numeric()) {
    return {Verdict::undecidable, "numeric form compared against symbolic form"};
  }

  if (a.normalized == b.normalized) {
    return {Verdict::equivalent, "identical after normalization"};
  }

  const auto parts_a = split_top_level_commas(a.normalized);
  const auto parts_b = split_top_level_commas(b.normalized);
  if (parts_a.size() >= 2 && parts_a.size() == parts_b.size() &&
      !has_top_level_equals(a.normalized) && !has_top_level_equals(b.normalized)) {
    bool all_numeric = true;
    std::vector<std::string> keys_a, keys_b;
    for (const auto& part : parts_a) {
      bool numeric = false;
      keys_a.push_back(element_key(part, numeric));
      all_numeric = all_numeric && numeric;
    }
    for (const auto& part : parts_b) {
      bool numeric = false;
      keys_b.push_back(element_key(part, numeric));
      all_numeric = all_numeric && numeric;
    }
    std::sort(keys_a.begin(), keys_a.end());
    std::sort(keys_b.begin(), keys_b.end());
    if (keys_a == keys_b) {
      return {Verdict::equivalent, "comma lists match as multisets"};
    }
    if (all_numeric) {
      return {Verdict::different, "numeric comma lists differ as multisets"};
    }
    return {Verdict::undecidable, "symbolic comma lists differ textually"};
  }

  return {Verdict::undecidable,
          "symbolic forms differ textually; no algebraic simplification applied"};
}

}  // namespace dlcot
