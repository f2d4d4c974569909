#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "dlcot/diagnostics.hpp"
#include "dlcot/structure_parser.hpp"

namespace {

// A trace of `sections` blocks, each with distinctive serialized sentences.
std::vector<std::string> synthetic_sections(int sections, int sentences) {
  std::vector<std::string> bodies;
  int serial = 0;
  for (int s = 0; s < sections; ++s) {
    std::string body;
    for (int i = 0; i < sentences; ++i) {
      body += "Step " + std::to_string(serial) +
              ": the running total moves toward the target, as noted in line " +
              std::to_string(serial) + ". ";
      ++serial;
    }
    bodies.push_back(body);
  }
  return bodies;
}

void BM_LocateSections(benchmark::State& state) {
  const auto bodies = synthetic_sections(5, static_cast<int>(state.range(0)));
  std::string original;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    if (i) original += "\n\n";
    original += bodies[i];
  }
  dlcot::Diagnostics diag;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dlcot::locate_section_spans(original, bodies, {}, diag));
  }
  state.SetBytesProcessed(state.iterations() * original.size());
}
BENCHMARK(BM_LocateSections)->Arg(8)->Arg(64)->Arg(256);

void BM_LocateSectionsCorruptedAnchor(benchmark::State& state) {
  auto bodies = synthetic_sections(5, static_cast<int>(state.range(0)));
  std::string original;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    if (i) original += "\n\n";
    original += bodies[i];
  }
  // Corrupt the head of section 3's echo so the locator takes the tail and
  // fuzzy routes.
  bodies[2].replace(0, 12, "Mangled head");
  dlcot::Diagnostics diag;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dlcot::locate_section_spans(original, bodies, {}, diag));
  }
}
BENCHMARK(BM_LocateSectionsCorruptedAnchor)->Arg(8)->Arg(64);

void BM_CharSimilarity(benchmark::State& state) {
  const std::string a = "the quantity reduces to a simpler closed form here";
  const std::string b = "the quantity rather reduces to simpler closed forms";
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dlcot::char_similarity(std::string_view(a).substr(0, 40),
                               std::string_view(b).substr(0, 40)));
  }
}
BENCHMARK(BM_CharSimilarity);

}  // namespace
