#pragma once

#include <mutex>
#include <ostream>
#include <string>
#include <vector>

namespace dlcot {

struct Diagnostic {
  std::string record_id;  // empty when not tied to a record
  std::string stage;      // empty when not tied to a stage
  std::string message;
};

/// Thread-safe collector for per-record diagnostics. Operations report
/// non-fatal problems here instead of writing to stderr directly; the CLI
/// decides whether to echo them.
class Diagnostics {
 public:
  Diagnostics() = default;
  explicit Diagnostics(std::ostream* echo) : echo_(echo) {}

  void emit(std::string message) { emit("", "", std::move(message)); }

  void emit(std::string record_id, std::string stage, std::string message);

  std::vector<Diagnostic> entries() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// True if any entry's message contains `needle`.
  bool contains(const std::string& needle) const;

 private:
  mutable std::mutex mutex_;
  std::vector<Diagnostic> entries_;
  std::ostream* echo_ = nullptr;
};

}  // namespace dlcot
