#pragma once

#include <stdexcept>
#include <string>

namespace dlcot {

/// Unrecoverable: bad configuration, unreadable input, incomplete fixtures.
/// Aborts the whole run.
class FatalError : public std::runtime_error {
 public:
  explicit FatalError(const std::string& what) : std::runtime_error(what) {}
};

/// Offline replay store has no entry for a request.
class MissingFixtureError : public FatalError {
 public:
  explicit MissingFixtureError(const std::string& key)
      : FatalError("missing fixture: " + key), key_(key) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Recoverable at record granularity: the record is marked failed at the
/// current stage and the pipeline continues with the rest of the corpus.
class RecordError : public std::runtime_error {
 public:
  explicit RecordError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dlcot
