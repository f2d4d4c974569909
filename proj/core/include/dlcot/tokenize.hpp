#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dlcot {

enum class TokenizerKind { unicode_words, vocab_file };

/// Tokenizer selection. The default splitter is deterministic,
/// dependency-free, and monotone under text deletion; a subword vocabulary
/// file can be supplied when counts must be comparable with a specific
/// model's tokenizer.
struct TokenizerSpec {
  TokenizerKind kind = TokenizerKind::unicode_words;
  std::filesystem::path vocab_path;  // required for vocab_file

  static TokenizerSpec unicode_words() { return {}; }
  static TokenizerSpec from_vocab(std::filesystem::path path) {
    return TokenizerSpec{TokenizerKind::vocab_file, std::move(path)};
  }
};

class Tokenizer {
 public:
  /// Throws FatalError if a vocab_file spec names a missing file.
  explicit Tokenizer(const TokenizerSpec& spec = {});

  /// unicode_words: digit runs, letter runs, and individual symbol
  /// characters each count as one token ("2y + 3y" -> 2,y,+,3,y -> 5).
  /// Multi-byte UTF-8 sequences classify as letters. vocab_file: greedy
  /// longest-match segmentation; unmatched bytes fall back to one token
  /// per character.
  std::size_t count(std::string_view text) const;

  std::vector<std::string> split(std::string_view text) const;

 private:
  TokenizerKind kind_;
  std::vector<std::string> vocab_;      // sorted, for longest-match lookup
  std::size_t max_vocab_entry_len_ = 0;
};

/// One-shot convenience.
std::size_t count_tokens(std::string_view text, const TokenizerSpec& spec = {});

}  // namespace dlcot
