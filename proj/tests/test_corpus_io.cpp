#include "doctest.h"
#include "dlcot/artifact_store.hpp"
#include "dlcot/errors.hpp"
#include "dlcot/record.hpp"
#include "temp_dir.hpp"

#include <fstream>

using namespace dlcot;
using dlcot::test::TempDir;

namespace {

void write_lines(const std::filesystem::path& path,
                 const std::vector<std::string>& lines) {
  std::ofstream out(path);
  for (const auto& line : lines) out << line << "\n";
}

std::string record_line(const std::string& id, const std::string& text = "work") {
  return nlohmann::json{{"id", id},
                        {"question", "q"},
                        {"solution_text", text},
                        {"gold_answer", "42"}}
      .dump();
}

}  // namespace

TEST_CASE("read_records yields valid lines in file order") {
  TempDir dir;
  const auto path = dir / "corpus.jsonl";
  write_lines(path, {record_line("a"), record_line("b"), record_line("c")});

  Diagnostics diag;
  const auto records = read_all_records(path, diag);
  REQUIRE(records.size() == 3);
  CHECK(records[0].id == "a");
  CHECK(records[1].id == "b");
  CHECK(records[2].id == "c");
  CHECK(diag.empty());
}

TEST_CASE("malformed lines are reported with their line number") {
  TempDir dir;
  const auto path = dir / "corpus.jsonl";
  write_lines(path, {record_line("a"), "{not json", record_line("b")});

  Diagnostics diag;
  const auto records = read_all_records(path, diag);
  CHECK(records.size() == 2);
  REQUIRE(diag.size() == 1);
  CHECK(diag.contains("line 2"));
}

TEST_CASE("strict mode escalates malformed lines") {
  TempDir dir;
  const auto path = dir / "corpus.jsonl";
  write_lines(path, {record_line("a"), "{not json"});

  Diagnostics diag;
  ReadOptions options;
  options.strict = true;
  CHECK_THROWS_AS(read_all_records(path, diag, options), FatalError);
}

TEST_CASE("limit truncates the stream") {
  TempDir dir;
  const auto path = dir / "corpus.jsonl";
  write_lines(path, {record_line("a"), record_line("b"), record_line("c")});

  Diagnostics diag;
  ReadOptions options;
  options.limit = 1;
  const auto records = read_all_records(path, diag, options);
  REQUIRE(records.size() == 1);
  CHECK(records[0].id == "a");
}

TEST_CASE("duplicate ids are fatal") {
  TempDir dir;
  const auto path = dir / "corpus.jsonl";
  write_lines(path, {record_line("a"), record_line("a")});
  Diagnostics diag;
  CHECK_THROWS_AS(read_all_records(path, diag), FatalError);
}

TEST_CASE("missing file is fatal; empty and invalid records are diagnostics") {
  Diagnostics diag;
  CHECK_THROWS_AS(read_all_records("/nonexistent/corpus.jsonl", diag), FatalError);

  TempDir dir;
  const auto path = dir / "corpus.jsonl";
  write_lines(path, {nlohmann::json{{"id", ""}, {"solution_text", "x"}}.dump(),
                     nlohmann::json{{"id", "ok"}, {"solution_text", ""}}.dump(),
                     record_line("good")});
  Diagnostics diag2;
  const auto records = read_all_records(path, diag2);
  CHECK(records.size() == 1);
  CHECK(diag2.size() == 2);
}

TEST_CASE("artifact round trip is byte-identical") {
  TempDir dir;
  ArtifactStore store(dir.path);

  StageArtifact artifact;
  artifact.record_id = "rec-1";
  artifact.stage = Stage::segmented;
  artifact.payload = {{"sections", {{"Question_Repeat", "text with \n newlines"}}},
                      {"order", {"Question_Repeat"}}};
  store.write(artifact);

  Diagnostics diag;
  const auto loaded = store.read(Stage::segmented, "", "rec-1", diag);
  REQUIRE(loaded.has_value());
  CHECK(loaded->payload == artifact.payload);
  CHECK(diag.empty());
}

TEST_CASE("resume_point lists completed ids and skips corrupt artifacts") {
  TempDir dir;
  ArtifactStore store(dir.path);
  Diagnostics diag;

  CHECK(store.resume_point(Stage::segmented, diag).empty());

  for (const std::string id : {"a", "b"}) {
    StageArtifact artifact;
    artifact.record_id = id;
    artifact.stage = Stage::segmented;
    artifact.payload = {{"id", id}};
    store.write(artifact);
  }
  CHECK(store.resume_point(Stage::segmented, diag) ==
        std::set<std::string>{"a", "b"});

  // Flip one byte inside the payload of b's artifact.
  const auto path = store.artifact_path(Stage::segmented, "", "b");
  std::string content;
  {
    std::ifstream in(path);
    content.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto pos = content.find("\"id\": \"b\"");
  REQUIRE(pos != std::string::npos);
  content[pos + 7] = 'X';  // payload now says "id": "X", hash no longer matches
  {
    std::ofstream out(path, std::ios::trunc);
    out << content;
  }

  Diagnostics diag2;
  CHECK(store.resume_point(Stage::segmented, diag2) == std::set<std::string>{"a"});
  CHECK(diag2.contains("hash mismatch"));
}

TEST_CASE("strategy-namespaced stages keep ablation artifacts apart") {
  TempDir dir;
  ArtifactStore store(dir.path);

  StageArtifact artifact;
  artifact.record_id = "rec";
  artifact.stage = Stage::optimized;
  artifact.payload = {{"which", "multiall"}};
  store.write(artifact, "multiall");
  artifact.payload = {{"which", "multi1"}};
  store.write(artifact, "multi1");

  Diagnostics diag;
  CHECK(store.read(Stage::optimized, "multiall", "rec", diag)->payload["which"] ==
        "multiall");
  CHECK(store.read(Stage::optimized, "multi1", "rec", diag)->payload["which"] ==
        "multi1");
  CHECK_THROWS_AS(ArtifactStore::stage_dir_name(Stage::optimized, ""), FatalError);
}

TEST_CASE("atomic replace leaves no temp files behind") {
  TempDir dir;
  ArtifactStore store(dir.path);
  StageArtifact artifact;
  artifact.record_id = "rec";
  artifact.stage = Stage::parsed;
  artifact.payload = {{"v", 1}};
  store.write(artifact);
  artifact.payload = {{"v", 2}};
  store.write(artifact);

  std::size_t files = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(dir.path / "parsed")) {
    ++files;
    CHECK(entry.path().extension() == ".json");
  }
  CHECK(files == 1);

  Diagnostics diag;
  CHECK(store.read(Stage::parsed, "", "rec", diag)->payload["v"] == 2);
}
