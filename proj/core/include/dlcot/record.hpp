#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dlcot/diagnostics.hpp"
#include "json.hpp"

namespace dlcot {

/// One unit of work: a question, its full long reasoning trace (including
/// the final boxed answer), and the canonical gold answer.
struct CoTRecord {
  std::string id;
  std::string question;
  std::string solution_text;
  std::string gold_answer;
  std::string source;
  std::optional<int> difficulty;
  std::map<std::string, std::string> metadata;  // unknown input fields land here

  nlohmann::json to_json() const;
  static CoTRecord from_json(const nlohmann::json& j);
};

struct ReadOptions {
  std::optional<std::size_t> limit;
  bool strict = false;  // malformed line becomes fatal instead of a diagnostic
};

struct ReadReport {
  std::size_t lines_total = 0;
  std::size_t records_yielded = 0;
  std::size_t lines_malformed = 0;
};

/// Streams records from a UTF-8 JSON-lines file in file order. Malformed
/// lines are reported with their 1-based line number and skipped (fatal under
/// strict). Duplicate ids and unreadable files are always fatal.
ReadReport read_records(const std::filesystem::path& path,
                        const std::function<void(CoTRecord)>& sink,
                        Diagnostics& diag, const ReadOptions& options = {});

/// Convenience wrapper that collects the stream into a vector.
std::vector<CoTRecord> read_all_records(const std::filesystem::path& path,
                                        Diagnostics& diag,
                                        const ReadOptions& options = {});

void write_records(const std::filesystem::path& path,
                   const std::vector<CoTRecord>& records);

}  // namespace dlcot
