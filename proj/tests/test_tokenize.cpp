#include "doctest.h"
#include "dlcot/errors.hpp"
#include "dlcot/tokenize.hpp"
#include "temp_dir.hpp"

#include <fstream>
#include <random>

using namespace dlcot;

TEST_CASE("empty text has zero tokens") {
  CHECK(count_tokens("") == 0);
  CHECK(count_tokens("   \n\t  ") == 0);
}

TEST_CASE("digit runs, letter runs, and symbols split as documented") {
  // hand tokenization: 2 | y | + | 3 | y | + | 4 | y
  CHECK(count_tokens("2y + 3y + 4y") == 8);
  CHECK(count_tokens("abc") == 1);
  CHECK(count_tokens("abc123") == 2);
  CHECK(count_tokens("a+b") == 3);
}

TEST_CASE("latex fragment tokenization is stable") {
  const Tokenizer tokenizer;
  const auto tokens = tokenizer.split("\\frac{1}{2}");
  // backslash, frac, {, 1, }, {, 2, }
  CHECK(tokens.size() == 8);
  CHECK(tokens[0] == "\\");
  CHECK(tokens[1] == "frac");
}

TEST_CASE("duplicated text doubles the count across whitespace") {
  std::mt19937 rng(11);
  const std::string pieces[] = {"solve 2x + 4 = 10", "ratio \\frac{3}{7}",
                                "the answer is 42.", "x^2 - y^2 = (x-y)(x+y)"};
  for (const std::string& piece : pieces) {
    const std::size_t one = count_tokens(piece);
    CHECK(count_tokens(piece + " " + piece) == 2 * one);
    CHECK(count_tokens(piece + "\n\n" + piece) == 2 * one);
  }
}

TEST_CASE("counting is monotone under deletion of whole tokens") {
  const Tokenizer tokenizer;
  const std::string text = "Step 12: the sum 3 + 4 reduces to 7 after checking.";
  const std::size_t full = tokenizer.count(text);
  CHECK(tokenizer.count("Step 12: the sum reduces to 7 after checking.") < full);
}

TEST_CASE("utf-8 sequences count as letter runs") {
  CHECK(count_tokens("π") == 1);
  CHECK(count_tokens("π r 2") == 3);
}

TEST_CASE("vocab tokenizer uses greedy longest match") {
  test::TempDir dir;
  const auto vocab_path = dir / "vocab.txt";
  {
    std::ofstream out(vocab_path);
    out << "ab\nabc\nc\nd\n";
  }
  const Tokenizer tokenizer(TokenizerSpec::from_vocab(vocab_path));
  // "abcd": longest match at 0 is "abc", then "d" -> 2 tokens
  CHECK(tokenizer.count("abcd") == 2);
  // "abd": "ab" then "d"
  CHECK(tokenizer.count("abd") == 2);
  // unmatched characters fall back to single-char tokens
  CHECK(tokenizer.count("xyz") == 3);
}

TEST_CASE("missing vocab file is a fatal config error") {
  CHECK_THROWS_AS(Tokenizer(TokenizerSpec::from_vocab("/nonexistent/vocab.txt")),
                  FatalError);
}
