#include <benchmark/benchmark.h>

#include "dcert/analyzer.hpp"
#include "dcert/checker.hpp"
#include "dcert/ir.hpp"
#include "support/generator.hpp"

namespace {

using namespace dcert;

struct ScaleInput {
  Program program;
  PolicySpec policy;
  Certificate certificate;
};

const ScaleInput& scale_input(int functions) {
  static std::map<int, ScaleInput> cache;
  auto it = cache.find(functions);
  if (it == cache.end()) {
    ScaleInput input;
    input.program = parse_program(testing::scale_program_text(functions));
    input.policy = parse_policy(testing::scale_policy_text());
    input.certificate = analyze_program(input.program, input.policy).certificate;
    it = cache.emplace(functions, std::move(input)).first;
  }
  return it->second;
}

void BM_Parse(benchmark::State& state) {
  std::string text = testing::scale_program_text(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_program(text));
  }
}
BENCHMARK(BM_Parse)->Arg(100)->Arg(1000);

void BM_AnalyzeWorklist(benchmark::State& state) {
  const ScaleInput& input = scale_input(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        analyze_program(input.program, input.policy, FixpointMode::Worklist));
  }
}
BENCHMARK(BM_AnalyzeWorklist)->Arg(100)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Check(benchmark::State& state) {
  const ScaleInput& input = scale_input(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(check(input.program, input.policy, input.certificate));
  }
}
BENCHMARK(BM_Check)->Arg(100)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_EncodeDecode(benchmark::State& state) {
  const ScaleInput& input = scale_input(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode(encode(input.certificate)));
  }
}
BENCHMARK(BM_EncodeDecode)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
