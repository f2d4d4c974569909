#include "dlcot/tokenize.hpp"

#include <algorithm>
#include <fstream>

#include "dlcot/errors.hpp"

namespace dlcot {

namespace {

enum class CharClass { space, digit, letter, symbol };

CharClass classify(unsigned char c) {
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
    return CharClass::space;
  }
  if (c >= '0' && c <= '9') return CharClass::digit;
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
    return CharClass::letter;
  }
  if (c >= 0x80) return CharClass::letter;  // UTF-8 continuation/lead bytes
  return CharClass::symbol;
}

}  // namespace

Tokenizer::Tokenizer(const TokenizerSpec& spec) : kind_(spec.kind) {
  if (kind_ != TokenizerKind::vocab_file) return;

  std::ifstream in(spec.vocab_path);
  if (!in.is_open()) {
    throw FatalError("cannot open tokenizer vocab file: " + spec.vocab_path.string());
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    vocab_.push_back(line);
    max_vocab_entry_len_ = std::max(max_vocab_entry_len_, line.size());
  }
  std::sort(vocab_.begin(), vocab_.end());
  vocab_.erase(std::unique(vocab_.begin(), vocab_.end()), vocab_.end());
  if (vocab_.empty()) {
    throw FatalError("tokenizer vocab file is empty: " + spec.vocab_path.string());
  }
}

std::vector<std::string> Tokenizer::split(std::string_view text) const {
  std::vector<std::string> tokens;
  if (kind_ == TokenizerKind::unicode_words) {
    std::size_t i = 0;
    while (i < text.size()) {
      const CharClass cls = classify(static_cast<unsigned char>(text[i]));
      if (cls == CharClass::space) {
        ++i;
        continue;
      }
      if (cls == CharClass::symbol) {
        tokens.emplace_back(1, text[i]);
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < text.size() &&
             classify(static_cast<unsigned char>(text[j])) == cls) {
        ++j;
      }
      tokens.emplace_back(text.substr(i, j - i));
      i = j;
    }
    return tokens;
  }

  // Greedy longest match against the vocabulary.
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t max_len = std::min(max_vocab_entry_len_, text.size() - i);
    std::size_t matched = 0;
    for (std::size_t len = max_len; len >= 1; --len) {
      const std::string_view candidate = text.substr(i, len);
      if (std::binary_search(vocab_.begin(), vocab_.end(), candidate,
                             [](const auto& a, const auto& b) {
                               return std::string_view(a) < std::string_view(b);
                             })) {
        matched = len;
        break;
      }
    }
    if (matched == 0) matched = 1;  // single-character fallback
    tokens.emplace_back(text.substr(i, matched));
    i += matched;
  }
  return tokens;
}

std::size_t Tokenizer::count(std::string_view text) const {
  if (kind_ == TokenizerKind::unicode_words) {
    // Counting does not need materialized tokens.
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < text.size()) {
      const CharClass cls = classify(static_cast<unsigned char>(text[i]));
      if (cls == CharClass::space) {
        ++i;
        continue;
      }
      ++count;
      if (cls == CharClass::symbol) {
        ++i;
        continue;
      }
      ++i;
      while (i < text.size() &&
             classify(static_cast<unsigned char>(text[i])) == cls) {
        ++i;
      }
    }
    return count;
  }
  return split(text).size();
}

std::size_t count_tokens(std::string_view text, const TokenizerSpec& spec) {
  return Tokenizer(spec).count(text);
}

}  // namespace dlcot
