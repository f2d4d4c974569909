#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "dlcot/similarity.hpp"

namespace {

std::string synthetic_paragraph(std::mt19937& rng, int sentences) {
  static const char* kWords[] = {"expression", "reduces",  "fraction", "term",
                                 "integral",   "sequence", "bound",    "ratio",
                                 "factor",     "matrix"};
  std::string text;
  for (int s = 0; s < sentences; ++s) {
    text += "Step " + std::to_string(s) + ": the";
    for (int w = 0; w < 8; ++w) {
      text += " ";
      text += kWords[rng() % std::size(kWords)];
    }
    text += ". ";
  }
  return text;
}

void BM_Featurize(benchmark::State& state) {
  std::mt19937 rng(1);
  const std::string text = synthetic_paragraph(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dlcot::featurize(text));
  }
  state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_Featurize)->Arg(4)->Arg(16)->Arg(64);

void BM_Cosine(benchmark::State& state) {
  std::mt19937 rng(2);
  const auto a = dlcot::featurize(synthetic_paragraph(rng, 16));
  const auto b = dlcot::featurize(synthetic_paragraph(rng, 16));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dlcot::cosine(a, b));
  }
}
BENCHMARK(BM_Cosine);

void BM_ClusterApproaches(benchmark::State& state) {
  std::mt19937 rng(3);
  std::vector<std::string> texts;
  for (int i = 0; i < state.range(0); ++i) {
    texts.push_back(synthetic_paragraph(rng, 8));
  }
  dlcot::SimilarityConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dlcot::cluster_texts(texts, config));
  }
}
BENCHMARK(BM_ClusterApproaches)->Arg(4)->Arg(8)->Arg(32);

}  // namespace
