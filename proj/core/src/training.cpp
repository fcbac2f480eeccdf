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

#include "cate/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cate/errors.hpp"

namespace cate {

TrainingHistory run_training(const TrainingHooks& hooks, const TrainingOptions& options,
                             const std::string& what) {
  if (hooks.num_train == 0) throw TrainingError(what + ": empty training set");
  if (options.batch_size < 1 || options.max_epochs < 1 || options.patience < 1) {
    throw TrainingError(what + ": batch size, epochs and patience must be positive");
  }
  Rng shuffle_rng = make_rng(options.seed, Stream::kShuffle);
  Rng mask_rng = make_rng(options.seed, Stream::kTrainMask);
  TrainingHistory history;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  const auto batch = static_cast<std::size_t>(options.batch_size);
  std::vector<std::size_t> rows;
  rows.reserve(batch);

  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    const auto order = random_permutation(hooks.num_train, shuffle_rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      rows.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                  order.begin() + static_cast<std::ptrdiff_t>(stop));
      const double loss = hooks.train_batch(rows, mask_rng);
      if (!std::isfinite(loss)) {
        throw TrainingError(what + ": non-finite training loss in epoch " +
                            std::to_string(epoch) + " (rows " + std::to_string(start) + ".." +
                            std::to_string(stop - 1) + " of the shuffled order)");
      }
      total += loss;
    }
    if (hooks.parameters_finite && !hooks.parameters_finite()) {
      throw TrainingError(what + ": parameters became non-finite in epoch " +
                          std::to_string(epoch));
    }
    const double train_loss = total / static_cast<double>(hooks.num_train);
    history.train_loss.push_back(train_loss);
    double monitored = train_loss;
    if (hooks.validation_loss) {
      monitored = hooks.validation_loss();
      if (!std::isfinite(monitored)) {
        throw TrainingError(what + ": non-finite validation loss in epoch " +
                            std::to_string(epoch));
      }
      history.valid_loss.push_back(monitored);
    }
    history.epochs_run = epoch + 1;
    if (monitored < best) {
      best = monitored;
      since_best = 0;
      history.best_epoch = epoch;
      if (hooks.save_best) hooks.save_best();
    } else if (++since_best >= options.patience) {
      history.stopped_early = true;
      break;
    }
  }
  if (hooks.restore_best) hooks.restore_best();
  return history;
}

}  // namespace cate
