// Copyright 2026 The cate-bounds Authors.
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


#include <algorithm>
#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "cate/interval_table.hpp"
#include "cate/msm.hpp"

namespace {

std::vector<double> sorted_samples(std::size_t m) {
  cate::Rng rng(1);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> y(m);
  for (double& v : y) v = dist(rng);
  std::sort(y.begin(), y.end());
  return y;
}

void BM_ArmBounds(benchmark::State& state) {
  const auto y = sorted_samples(static_cast<std::size_t>(state.range(0)));
  const cate::OddsBounds odds = cate::odds_bounds(0.4, std::exp(1.0));
  for (auto _ : state) benchmark::DoNotOptimize(cate::arm_bounds(y, 0.0, odds));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ArmBounds)->RangeMultiplier(10)->Range(100, 100000)->Complexity(benchmark::oN);

void BM_IntervalTable(benchmark::State& state) {
  const cate::FittedModels models{cate::OutcomeModel(1, {{}, {200, 200, 200}, 5, 0.1}, 1),
                                  cate::PropensityModel(1, {{200, 200, 200}, 0.1, 0.01}, 2)};
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(1, state.range(0)) * 2.0;
  cate::TableOptions options;
  options.num_param_samples = 10;
  const std::vector<double> gammas = {1.0, std::exp(0.5), std::exp(1.0), std::exp(1.5)};
  for (auto _ : state) benchmark::DoNotOptimize(cate::compute_interval_table(models, x, gammas, options));
  state.SetItemsProcessed(state.iterations() * state.range(0) * options.num_param_samples);
}
BENCHMARK(BM_IntervalTable)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
