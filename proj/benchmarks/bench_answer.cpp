#include <benchmark/benchmark.h>

#include <string>

#include "dlcot/answer.hpp"
#include "dlcot/digest.hpp"

namespace {

void BM_ExtractBoxed(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < state.range(0); ++i) {
    text += "Working through step " + std::to_string(i) + " of the derivation. ";
  }
  text += "\\[ \\boxed{\\frac{546}{5}} \\]";
  for (auto _ : state) {
    benchmark::DoNotOptimize(dlcot::extract_boxed(text));
  }
  state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_ExtractBoxed)->Arg(16)->Arg(256)->Arg(4096);

void BM_EquivalentNumeric(benchmark::State& state) {
  const auto a = dlcot::make_answer_form("109.2");
  const auto b = dlcot::make_answer_form("\\frac{546}{5}");
  for (auto _ : state) {
    benchmark::DoNotOptimize(dlcot::equivalent(a, b));
  }
}
BENCHMARK(BM_EquivalentNumeric);

void BM_NormalizeExpression(benchmark::State& state) {
  const std::string raw =
      "DE \\parallel BC \\text{ and } DE = \\dfrac{{1}}{{2}}BC";
  for (auto _ : state) {
    benchmark::DoNotOptimize(dlcot::normalize_answer_text(raw));
  }
}
BENCHMARK(BM_NormalizeExpression);

void BM_Sha256(benchmark::State& state) {
  const std::string data(static_cast<std::size_t>(state.range(0)), 'x');
  for (auto _ : state) {
    benchmark::DoNotOptimize(dlcot::sha256_hex(data));
  }
  state.SetBytesProcessed(state.iterations() * data.size());
}
BENCHMARK(BM_Sha256)->Arg(64)->Arg(4096)->Arg(1 << 20);

}  // namespace
