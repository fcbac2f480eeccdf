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

// Minibatch training loop with early stopping, shared by the outcome and
// propensity models.

#ifndef CATE_TRAINING_HPP_
#define CATE_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cate/random.hpp"

namespace cate {

struct TrainingOptions {
  int batch_size = 32;
  int patience = 20;
  int max_epochs = 2000;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

struct TrainingHistory {
  std::vector<double> train_loss;  // mean minibatch loss per epoch
  std::vector<double> valid_loss;  // mask-free validation loss per epoch
  int best_epoch = -1;
  int epochs_run = 0;
  bool stopped_early = false;
};

// Callbacks describing one model. `train_batch` performs a single optimizer
// step on the given rows and returns the summed loss over them;
// `validation_loss` evaluates without dropout (null when there is no
// validation data, in which case the epoch training loss drives stopping).
struct TrainingHooks {
  std::size_t num_train = 0;
  std::function<double(const std::vector<std::size_t>& rows, Rng& mask_rng)> train_batch;
  std::function<double()> validation_loss;
  std::function<bool()> parameters_finite;
  std::function<void()> save_best;
  std::function<void()> restore_best;
};

// Shuffles each epoch, stops after `patience` epochs without improvement and
// restores the best parameters. Throws TrainingError (naming `what` and the
// epoch) when a loss or parameter becomes non-finite.
TrainingHistory run_training(const TrainingHooks& hooks, const TrainingOptions& options,
                             const std::string& what);

}  // namespace cate

#endif  // CATE_TRAINING_HPP_
