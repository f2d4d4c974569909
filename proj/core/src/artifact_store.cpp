#include "dlcot/artifact_store.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>

#include "dlcot/digest.hpp"
#include "dlcot/errors.hpp"
#include "dlcot/version.hpp"

namespace dlcot {

namespace fs = std::filesystem;

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::segmented: return "segmented";
    case Stage::parsed: return "parsed";
    case Stage::analyzed: return "analyzed";
    case Stage::optimized: return "optimized";
    case Stage::reconstructed: return "reconstructed";
  }
  return "unknown";
}

std::optional<Stage> stage_from_name(const std::string& name) {
  for (Stage s : {Stage::segmented, Stage::parsed, Stage::analyzed,
                  Stage::optimized, Stage::reconstructed}) {
    if (name == stage_name(s)) return s;
  }
  return std::nullopt;
}

std::string payload_hash(const nlohmann::json& payload) {
  // nlohmann keeps object keys sorted, so dump() is canonical.
  return sha256_hex(payload.dump());
}

std::string ArtifactStore::stage_dir_name(Stage stage, const std::string& strategy) {
  if (stage == Stage::optimized || stage == Stage::reconstructed) {
    if (strategy.empty()) {
      throw FatalError(std::string("stage '") + stage_name(stage) +
                       "' requires a strategy name");
    }
    return std::string(stage_name(stage)) + "-" + strategy;
  }
  return stage_name(stage);
}

fs::path ArtifactStore::artifact_path(Stage stage, const std::string& strategy,
                                      const std::string& record_id) const {
  return root_ / stage_dir_name(stage, strategy) / (record_id + ".json");
}

void ArtifactStore::write(const StageArtifact& artifact, const std::string& strategy) {
  const fs::path path = artifact_path(artifact.stage, strategy, artifact.record_id);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) {
    throw FatalError("cannot create artifact directory " +
                     path.parent_path().string() + ": " + ec.message());
  }

  nlohmann::json j{{"record_id", artifact.record_id},
                   {"stage", stage_name(artifact.stage)},
                   {"pipeline_version", artifact.pipeline_version.empty()
                                            ? kPipelineVersion
                                            : artifact.pipeline_version},
                   {"content_hash", payload_hash(artifact.payload)},
                   {"payload", artifact.payload}};

  // Write to a sibling temp file, then rename into place. Rename is atomic,
  // so readers never observe a partially written artifact.
  static std::atomic<unsigned> counter{0};
  const fs::path tmp = path.parent_path() /
                       (path.filename().string() + ".tmp" +
                        std::to_string(counter.fetch_add(1)) + "-" +
                        std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out.is_open()) {
      throw FatalError("cannot open temp artifact file: " + tmp.string());
    }
    out << j.dump(2) << "\n";
    out.flush();
    if (!out.good()) {
      std::error_code rm;
      fs::remove(tmp, rm);
      throw FatalError("write failed for artifact: " + path.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code rm;
    fs::remove(tmp, rm);
    throw FatalError("cannot replace artifact " + path.string() + ": " + ec.message());
  }
}

WriteReport ArtifactStore::write_all(const std::vector<StageArtifact>& artifacts,
                                     const std::string& strategy) {
  WriteReport report;
  for (const auto& artifact : artifacts) {
    try {
      write(artifact, strategy);
      ++report.written;
    } catch (const FatalError& e) {
      // Disk-level failure aborts the batch; the error names what landed so
      // the partial write is accounted for.
      report.failed_ids.push_back(artifact.record_id);
      throw FatalError(std::string(e.what()) + " (wrote " +
                       std::to_string(report.written) + " of " +
                       std::to_string(artifacts.size()) + " artifacts; failed at '" +
                       artifact.record_id + "')");
    }
  }
  return report;
}

std::optional<StageArtifact> ArtifactStore::read(Stage stage,
                                                 const std::string& strategy,
                                                 const std::string& record_id,
                                                 Diagnostics& diag) const {
  const fs::path path = artifact_path(stage, strategy, record_id);
  std::ifstream in(path);
  if (!in.is_open()) return std::nullopt;

  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    diag.emit(record_id, stage_name(stage),
              std::string("unreadable artifact: ") + e.what());
    return std::nullopt;
  }

  StageArtifact artifact;
  artifact.record_id = j.value("record_id", record_id);
  artifact.stage = stage;
  artifact.pipeline_version = j.value("pipeline_version", std::string{});
  artifact.content_hash = j.value("content_hash", std::string{});
  if (!j.contains("payload")) {
    diag.emit(record_id, stage_name(stage), "artifact missing payload");
    return std::nullopt;
  }
  artifact.payload = j["payload"];

  if (payload_hash(artifact.payload) != artifact.content_hash) {
    diag.emit(record_id, stage_name(stage),
              "content hash mismatch, artifact excluded: " + path.string());
    return std::nullopt;
  }
  return artifact;
}

std::set<std::string> ArtifactStore::resume_point(Stage stage, Diagnostics& diag,
                                                  const std::string& strategy) const {
  std::set<std::string> ids;
  const fs::path dir = root_ / stage_dir_name(stage, strategy);
  std::error_code ec;
  if (!fs::exists(dir, ec)) return ids;

  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& path = entry.path();
    if (path.extension() != ".json") continue;
    const std::string record_id = path.stem().string();
    if (read(stage, strategy, record_id, diag).has_value()) {
      ids.insert(record_id);
    }
  }
  return ids;
}

}  // namespace dlcot
