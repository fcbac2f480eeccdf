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


#include <benchmark/benchmark.h>

#include "cate/nn.hpp"
#include "cate/outcome_model.hpp"
#include "cate/simulated.hpp"

namespace {

void BM_Forward(benchmark::State& state) {
  const cate::nn::DenseNetwork net = cate::nn::make_mlp({784, {200, 200, 200}, 15, 0.1}, 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(784, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cate::nn::forward(net, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(32)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_ForwardBackward(benchmark::State& state) {
  const cate::nn::DenseNetwork net = cate::nn::make_mlp({2, {200, 200, 200}, 15, 0.1}, 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, state.range(0));
  cate::Rng rng(2);
  const cate::nn::DropoutMask mask = cate::nn::sample_mask(net, rng, state.range(0));
  const Eigen::MatrixXd grad = Eigen::MatrixXd::Ones(15, state.range(0));
  cate::nn::ForwardPass tape;
  for (auto _ : state) {
    cate::nn::forward(net, x, &mask, &tape);
    benchmark::DoNotOptimize(cate::nn::backward(net, tape, grad));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_OutcomeEpoch(benchmark::State& state) {
  const cate::DatasetSplits data = cate::generate_simulated_splits(state.range(0), 0, 0, 1.0, 3);
  cate::TrainingOptions options;
  options.max_epochs = 1;
  options.patience = 1;
  for (auto _ : state) {
    cate::OutcomeModel model(1, {{}, {200, 200, 200}, 5, 0.1}, 4);
    cate::fit_outcome_model(model, data.train, cate::Dataset(), options);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OutcomeEpoch)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
