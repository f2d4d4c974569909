#include "doctest.h"
#include "dlcot/answer.hpp"
#include "dlcot/diagnostics.hpp"

#include <random>
#include <vector>

using namespace dlcot;

TEST_CASE("extract_boxed returns the last balanced boxed group") {
  const auto form = extract_boxed("some work, so \\boxed{42}.");
  REQUIRE(form.has_value());
  CHECK(form->raw == "42");
  CHECK(form->kind == AnswerKind::integer);

  const auto last = extract_boxed("first \\boxed{1} then finally \\boxed{2}");
  REQUIRE(last.has_value());
  CHECK(last->raw == "2");
}

TEST_CASE("extract_boxed handles nested braces and expression answers") {
  const std::string conclusion =
      "\n\n**Final Answer**\n\n\\[ \\boxed{DE \\parallel BC \\text{ and } DE = "
      "\\frac{1}{2}BC} \\].";
  const auto form = extract_boxed(conclusion);
  REQUIRE(form.has_value());
  CHECK(form->raw == "DE \\parallel BC \\text{ and } DE = \\frac{1}{2}BC");
  CHECK(form->kind == AnswerKind::expression);
}

TEST_CASE("extract_boxed reports unbalanced braces") {
  Diagnostics diag;
  const auto form = extract_boxed("broken \\boxed{1 + (2", &diag);
  CHECK_FALSE(form.has_value());
  CHECK(diag.contains("unbalanced"));
}

TEST_CASE("extract_boxed returns none when absent") {
  CHECK_FALSE(extract_boxed("no final answer here").has_value());
}

TEST_CASE("answer kinds are detected from normalized text") {
  CHECK(make_answer_form("42").kind == AnswerKind::integer);
  CHECK(make_answer_form("-7").kind == AnswerKind::integer);
  CHECK(make_answer_form("109.2").kind == AnswerKind::decimal);
  CHECK(make_answer_form("\\frac{546}{5}").kind == AnswerKind::rational);
  CHECK(make_answer_form("3/4").kind == AnswerKind::rational);
  CHECK(make_answer_form("x + 1").kind == AnswerKind::expression);
}

TEST_CASE("rational forms are stored reduced") {
  const auto form = make_answer_form("\\frac{6}{4}");
  CHECK(form.numerator == 3);
  CHECK(form.denominator == 2);
}

namespace {

EquivalenceResult eq(const std::string& a, const std::string& b) {
  return equivalent(make_answer_form(a), make_answer_form(b));
}

}  // namespace

TEST_CASE("equivalence suite") {
  const std::vector<std::pair<std::string, std::string>> equivalent_pairs = {
      {"109.2", "\\frac{546}{5}"},  // decimals are exact rationals
      {"42", "42"},
      {"42", "42.0"},
      {"-3", "-3"},
      {"0.5", "\\frac{1}{2}"},
      {"0.5", "1/2"},
      {"\\frac{2}{4}", "\\frac{1}{2}"},
      {"\\frac{{546}}{{5}}", "109.2"},  // doubled braces collapse
      {"\\dfrac{1}{2}", "\\frac{1}{2}"},
      {"\\frac12", "\\frac{1}{2}"},
      {"-\\frac{1}{2}", "-0.5"},
      {"2.50", "\\frac{5}{2}"},
      {"7", "7."},
      {"  42 ", "42"},
      {"\\left(1,2\\right)", "(1,2)"},
      {"1, 2", "2, 1"},                        // '='-free comma list reorders
      {"x+y, 3", "3, x+y"},
      {"\\frac{1}{3}, 0.5", "0.5, \\frac{1}{3}"},
      {"\\pi r^2", "\\pi r^2"},
      {"\\pi r^2", "\\pi r^2 "},
      {"x=2", "x=2"},
  };
  for (const auto& [a, b] : equivalent_pairs) {
    CAPTURE(a);
    CAPTURE(b);
    CHECK(eq(a, b).verdict == Verdict::equivalent);
  }

  const std::vector<std::pair<std::string, std::string>> different_pairs = {
      {"\\frac{1}{2}", "0.6"},  // 1/2 = 5/10 vs 6/10 by exact rationals
      {"42", "43"},
      {"-1", "1"},
      {"0.333", "\\frac{1}{3}"},  // terminating decimal is not one third
      {"\\frac{2}{3}", "\\frac{3}{2}"},
      {"1, 2", "1, 3"},
      {"7", "7.5"},
      {"100", "10"},
      {"0.25", "0.52"},
      {"\\frac{5}{2}", "2.05"},
  };
  for (const auto& [a, b] : different_pairs) {
    CAPTURE(a);
    CAPTURE(b);
    CHECK(eq(a, b).verdict == Verdict::different);
  }

  const std::vector<std::pair<std::string, std::string>> undecidable_pairs = {
      {"x + 1", "2"},
      {"\\sqrt{2}", "1.414"},
      {"\\pi r^2", "\\pi d^2 / 4"},
      {"x=2", "x=3"},  // '=' lists never reorder or decide
  };
  for (const auto& [a, b] : undecidable_pairs) {
    CAPTURE(a);
    CAPTURE(b);
    CHECK(eq(a, b).verdict == Verdict::undecidable);
  }
}

TEST_CASE("equivalence is reflexive and symmetric on assorted forms") {
  const std::vector<std::string> forms = {
      "42",      "-3",          "109.2",       "\\frac{546}{5}", "0.5",
      "x + 1",   "\\sqrt{2}",   "1, 2, 3",     "\\pi r^2",       "x=2",
      "\\frac{1}{3}", "DE \\parallel BC \\text{ and } DE = \\frac{1}{2}BC"};
  for (const auto& a : forms) {
    CAPTURE(a);
    CHECK(eq(a, a).verdict == Verdict::equivalent);  // reflexivity
    for (const auto& b : forms) {
      CHECK(eq(a, b).verdict == eq(b, a).verdict);  // symmetry
    }
  }
}

TEST_CASE("answer_from_text prefers a boxed value when present") {
  CHECK(answer_from_text("42").raw == "42");
  CHECK(answer_from_text("the result is \\boxed{42}").raw == "42");
  CHECK(answer_from_text("\\frac{1}{2}").kind == AnswerKind::rational);
}

TEST_CASE("normalization is idempotent") {
  const std::vector<std::string> forms = {
      "\\dfrac{{546}}{{5}}", "  1, 2 ,3  ", "\\left( x \\right)", "\\frac 1 2",
      "42.", "\\pi r^2", "DE \\parallel BC \\text{ and } DE = \\frac{1}{2}BC"};
  for (const auto& raw : forms) {
    CAPTURE(raw);
    const std::string once = normalize_answer_text(raw);
    CHECK(normalize_answer_text(once) == once);
  }
}

TEST_CASE("terminating decimals agree with their rationals") {
  // Oracle: render p/q exactly when q = 2^a * 5^b, then compare via
  // equivalent(). The rendering below is plain long arithmetic,
  // independent of the parser.
  std::mt19937 rng(1234);
  int tested = 0;
  while (tested < 200) {
    const long long q_pow2 = 1LL << (rng() % 4);
    long long q = q_pow2;
    for (unsigned i = rng() % 4; i > 0; --i) q *= 5;
    if (q > 1000) continue;
    const long long p = static_cast<long long>(rng() % 2000) - 1000;
    if (p == 0) continue;

    // smallest 10^k divisible by q (exists because q = 2^a 5^b)
    long long k = 0, scale = 1;
    while (scale % q != 0 && k < 13) {
      scale *= 10;
      ++k;
    }
    if (scale % q != 0) continue;
    const long long scaled = p * (scale / q);

    std::string digits = std::to_string(scaled < 0 ? -scaled : scaled);
    while (static_cast<long long>(digits.size()) <= k) digits.insert(0, "0");
    std::string decimal = (scaled < 0 ? "-" : "") +
                          digits.substr(0, digits.size() - k) +
                          (k > 0 ? "." + digits.substr(digits.size() - k) : "");

    const std::string fraction =
        "\\frac{" + std::to_string(p) + "}{" + std::to_string(q) + "}";
    CAPTURE(decimal);
    CAPTURE(fraction);
    CHECK(eq(decimal, fraction).verdict == Verdict::equivalent);
    ++tested;
  }
}
