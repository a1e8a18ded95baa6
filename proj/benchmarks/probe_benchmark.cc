// Copyright 2026 The mcqa-probe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <benchmark/benchmark.h>

#include "mcqa_probe/augment.h"
#include "mcqa_probe/evalreport.h"
#include "mcqa_probe/perturb.h"
#include "mcqa_probe/scorer.h"
#include "mcqa_probe/train.h"
#include "testing.h"

namespace mcqa_probe {
namespace {

void BM_Featurize(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const std::string q = testing::RandomText(rng, 12);
  const std::string o = testing::RandomText(rng, 6);
  const std::string c = testing::RandomText(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Featurize(q, o, c));
}
BENCHMARK(BM_Featurize)->Arg(16)->Arg(128)->Arg(1024);

void BM_PerturbPio(benchmark::State& state) {
  const Dataset d = testing::SeparableCorpus(static_cast<std::size_t>(state.range(0)), 4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(PerturbPio(d, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PerturbPio)->Arg(1000);

void BM_AugmentEpoch(benchmark::State& state) {
  const Dataset d = testing::SeparableCorpus(static_cast<std::size_t>(state.range(0)), 4, 3);
  const AugmentConfig config{0.2, 0.8, 11};
  std::uint64_t epoch = 0;
  for (auto _ : state) benchmark::DoNotOptimize(AugmentEpoch(d, config, epoch++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AugmentEpoch)->Arg(1000);

void BM_ScoreDataset(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const Dataset d = testing::SeparableCorpus(2000, 4, 4);
  const LinearScorer model(testing::RandomWeights(rng));
  const auto threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(model.ScoreDataset(d, threads));
}
BENCHMARK(BM_ScoreDataset)->Arg(1)->Arg(4)->UseRealTime();

void BM_Train(benchmark::State& state) {
  const Dataset d = testing::SeparableCorpus(500, 4, 5);
  TrainConfig config;
  config.loss = state.range(0) == 0 ? LossKind::kMulticlass : LossKind::kBinary;
  if (state.range(1) != 0) {
    config.epochs = kDefaultAugmentedEpochs;
    config.augment = AugmentConfig{0.2, 0.8, 5};
  }
  for (auto _ : state) benchmark::DoNotOptimize(Train(d, config));
}
BENCHMARK(BM_Train)->Args({0, 0})->Args({1, 0})->Args({1, 1})->Unit(benchmark::kMillisecond);

void BM_RenderReport(benchmark::State& state) {
  ComplianceInputs inputs;
  inputs.dataset_name = "QASC";
  inputs.model_name = "RoBERTa";
  inputs.accuracies = {{PerturbationSetting::kOriginal, 85.2},
                       {PerturbationSetting::kPio, 7.9},
                       {PerturbationSetting::kNo, 50.2},
                       {PerturbationSetting::kNq, 34.3},
                       {PerturbationSetting::kNc, 55.8}};
  inputs.chance_level = 12.5;
  const EvalReport report = ComplianceReport(inputs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RenderReport(report, ReportFormat::kMarkdown));
  }
}
BENCHMARK(BM_RenderReport);

}  // namespace
}  // namespace mcqa_probe

BENCHMARK_MAIN();
