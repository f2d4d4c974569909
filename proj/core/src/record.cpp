#include "dlcot/record.hpp"

#include <fstream>
#include <unordered_set>

#include "dlcot/errors.hpp"

namespace dlcot {

namespace {

const char* kKnownFields[] = {"id",          "question", "solution_text",
                              "gold_answer", "source",   "difficulty"};

bool is_known_field(const std::string& key) {
  for (const char* f : kKnownFields) {
    if (key == f) return true;
  }
  return false;
}

}  // namespace

nlohmann::json CoTRecord::to_json() const {
  nlohmann::json j{{"id", id},
                   {"question", question},
                   {"solution_text", solution_text},
                   {"gold_answer", gold_answer}};
  if (!source.empty()) j["source"] = source;
  if (difficulty.has_value()) j["difficulty"] = *difficulty;
  for (const auto& [key, value] : metadata) j[key] = value;
  return j;
}

CoTRecord CoTRecord::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw RecordError("record is not a JSON object");
  CoTRecord r;
  r.id = j.value("id", std::string{});
  r.question = j.value("question", std::string{});
  r.solution_text = j.value("solution_text", std::string{});
  r.gold_answer = j.value("gold_answer", std::string{});
  r.source = j.value("source", std::string{});
  if (j.contains("difficulty") && j["difficulty"].is_number_integer()) {
    r.difficulty = j["difficulty"].get<int>();
  }
  for (const auto& [key, value] : j.items()) {
    if (is_known_field(key)) continue;
    r.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  if (r.id.empty()) throw RecordError("record has empty id");
  if (r.solution_text.empty()) throw RecordError("record has empty solution_text");
  return r;
}

ReadReport read_records(const std::filesystem::path& path,
                        const std::function<void(CoTRecord)>& sink,
                        Diagnostics& diag, const ReadOptions& options) {
  std::ifstream in(path);
  if (!in.is_open()) {
    throw FatalError("cannot open corpus file: " + path.string());
  }

  ReadReport report;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++report.lines_total;
    if (line.empty()) continue;
    if (options.limit && report.records_yielded >= *options.limit) break;

    try {
      auto j = nlohmann::json::parse(line);
      CoTRecord record = CoTRecord::from_json(j);
      if (!seen_ids.insert(record.id).second) {
        throw FatalError("duplicate record id '" + record.id + "' at line " +
                         std::to_string(line_no) + " of " + path.string());
      }
      sink(std::move(record));
      ++report.records_yielded;
    } catch (const FatalError&) {
      throw;
    } catch (const std::exception& e) {
      ++report.lines_malformed;
      const std::string message = "malformed record at line " +
                                  std::to_string(line_no) + ": " + e.what();
      if (options.strict) {
        throw FatalError(message + " (strict mode)");
      }
      diag.emit("", "read", message);
    }
  }
  return report;
}

std::vector<CoTRecord> read_all_records(const std::filesystem::path& path,
                                        Diagnostics& diag,
                                        const ReadOptions& options) {
  std::vector<CoTRecord> records;
  read_records(
      path, [&](CoTRecord r) { records.push_back(std::move(r)); }, diag, options);
  return records;
}

void write_records(const std::filesystem::path& path,
                   const std::vector<CoTRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out.is_open()) {
    throw FatalError("cannot open output corpus for writing: " + path.string());
  }
  for (const auto& r : records) {
    out << r.to_json().dump() << "\n";
  }
  if (!out.good()) {
    throw FatalError("write failed for corpus file: " + path.string());
  }
}

}  // namespace dlcot
