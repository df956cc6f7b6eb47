// Copyright 2026 The doaprior Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "doa/dsp.h"
#include "doa/estimators.h"
#include "doa/eval.h"
#include "doa/grid.h"
#include "doa/prior.h"
#include "doa/simulator.h"

namespace doa {
namespace {

FrameSpectra OneFrame(Method method) {
  const auto g = DefaultBenchmarkArray();
  SceneSpec s;
  s.true_azimuth_deg = 60;
  s.snr_db = {10.0};
  s.duration_s = 0.256;
  const auto scene = SynthScene(s, g);
  EvalConfig cfg;
  cfg.estimator.method = method;
  return AnalyzeAudio(scene.noisy[0], cfg.ResolvedAnalysis(g.sample_rate_hz()))[0];
}

// Arg: free width in degrees (360 = no prior).
void BM_EstimateFrame(benchmark::State& state, Method method) {
  const auto g = DefaultBenchmarkArray();
  const auto frame = OneFrame(method);
  const auto grid = AngularGrid::Uniform(180);
  const double width = static_cast<double>(state.range(0));
  const auto prior = width >= 360 ? PriorMap::AllFree() : CenteredFreePrior(60.0, width);
  EstimatorOptions opt;
  opt.method = method;
  int evaluations = 0;
  for (auto _ : state) {
    const auto est = EstimateFrame(frame, g, grid, prior, opt);
    evaluations = est.evaluations;
    benchmark::DoNotOptimize(est.azimuth_deg);
  }
  state.counters["candidates"] = evaluations;
}

BENCHMARK_CAPTURE(BM_EstimateFrame, srp_phat, Method::kSrpPhat)
    ->Arg(360)->Arg(180)->Arg(90)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_EstimateFrame, music, Method::kMusic)
    ->Arg(360)->Arg(90)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_EstimateFrame, tops, Method::kTops)
    ->Arg(360)->Arg(90)->Unit(benchmark::kMicrosecond);

void BM_AnalyzeAudio(benchmark::State& state) {
  const auto g = DefaultBenchmarkArray();
  SceneSpec s;
  s.duration_s = 3.0;
  const auto scene = SynthScene(s, g);
  AnalysisOptions opt;
  opt.window_ms = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(AnalyzeAudio(scene.clean, opt).size());
  }
}
BENCHMARK(BM_AnalyzeAudio)->Arg(32)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SynthScene(benchmark::State& state) {
  const auto g = DefaultBenchmarkArray();
  SceneSpec s;
  s.snr_db = {0.0, 10.0};
  s.duration_s = 3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(SynthScene(s, g).clean.num_samples());
  }
}
BENCHMARK(BM_SynthScene)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace doa

BENCHMARK_MAIN();
