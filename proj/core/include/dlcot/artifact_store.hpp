#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dlcot/diagnostics.hpp"
#include "json.hpp"

namespace dlcot {

/// Pipeline stages in execution order. A record holding an artifact at stage
/// S is expected to hold artifacts at every earlier stage too.
enum class Stage { segmented, parsed, analyzed, optimized, reconstructed };

const char* stage_name(Stage stage);
std::optional<Stage> stage_from_name(const std::string& name);

/// One persisted intermediate result for one record at one stage. The hash
/// covers the payload so resume can detect tampered or truncated files.
struct StageArtifact {
  std::string record_id;
  Stage stage = Stage::segmented;
  nlohmann::json payload;
  std::string content_hash;  // filled on write; recomputed on read
  std::string pipeline_version;
};

std::string payload_hash(const nlohmann::json& payload);

struct WriteReport {
  std::size_t written = 0;
  std::vector<std::string> failed_ids;
};

/// One-file-per-record-per-stage store under a root directory:
///   <root>/<stage dir>/<record_id>.json
/// Stage directories for the pruning stages carry the strategy name
/// (e.g. optimized-multiall) so ablation variants coexist. Writes use
/// atomic replace, so concurrent writers on distinct records are safe.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }

  /// Directory name for a stage; `strategy` is required for the optimized
  /// and reconstructed stages and ignored otherwise.
  static std::string stage_dir_name(Stage stage, const std::string& strategy);

  std::filesystem::path artifact_path(Stage stage, const std::string& strategy,
                                      const std::string& record_id) const;

  void write(const StageArtifact& artifact, const std::string& strategy = "");

  WriteReport write_all(const std::vector<StageArtifact>& artifacts,
                        const std::string& strategy = "");

  /// Loads and verifies one artifact; nullopt when absent or corrupt
  /// (corruption is reported as a diagnostic).
  std::optional<StageArtifact> read(Stage stage, const std::string& strategy,
                                    const std::string& record_id,
                                    Diagnostics& diag) const;

  /// Record ids whose artifact at `stage` exists and passes the hash check.
  std::set<std::string> resume_point(Stage stage, Diagnostics& diag,
                                     const std::string& strategy = "") const;

 private:
  std::filesystem::path root_;
};

}  // namespace dlcot
