#include <benchmark/benchmark.h>

#include <string>

#include "dlcot/tokenize.hpp"

namespace {

std::string math_prose(std::size_t repeats) {
  std::string text;
  for (std::size_t i = 0; i < repeats; ++i) {
    text += "Substituting x = " + std::to_string(i) +
            " into 2x + 3 gives \\frac{" + std::to_string(2 * i + 3) +
            "}{1}, so the running sum grows. ";
  }
  return text;
}

void BM_CountTokens(benchmark::State& state) {
  const std::string text = math_prose(static_cast<std::size_t>(state.range(0)));
  const dlcot::Tokenizer tokenizer;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tokenizer.count(text));
  }
  state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_CountTokens)->Arg(16)->Arg(256)->Arg(4096);

void BM_SplitTokens(benchmark::State& state) {
  const std::string text = math_prose(64);
  const dlcot::Tokenizer tokenizer;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tokenizer.split(text));
  }
}
BENCHMARK(BM_SplitTokens);

}  // namespace
