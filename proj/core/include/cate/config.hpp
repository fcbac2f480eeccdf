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

// Experiment configuration: a JSON document validated into a fully defaulted
// ExperimentConfig. See README for the schema.

#ifndef CATE_CONFIG_HPP_
#define CATE_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "cate/outcome_model.hpp"
#include "cate/propensity.hpp"
#include "cate/training.hpp"

namespace cate {

enum class DatasetKind { kSimulated, kHcmnist, kIhdp };

std::string to_string(DatasetKind kind);

struct DatasetConfig {
  DatasetKind kind = DatasetKind::kSimulated;
  int n_train = 1000;
  int n_valid = 100;
  int n_test = 1000;
  std::vector<double> log_gamma_stars = {1.0};  // ignored for ihdp
  std::string mnist_dir;
  std::string ihdp_csv;  // empty: surrogate covariates
};

struct ModelConfig {
  std::vector<int> encoder_hidden;
  std::vector<int> hidden = {200, 200, 200};
  int components = 5;
  double dropout_rate = 0.1;
  int batch_size = 32;
  int patience = 20;
  int max_epochs = 2000;
  double learning_rate = 1e-3;
};

struct DeferralConfig {
  bool enabled = false;
  std::vector<double> multipliers;  // standard-deviation multipliers, increasing
};

struct SensitivityConfig {
  std::vector<double> log_gammas = {0.0, 0.5, 1.0, 1.5};  // increasing
  int num_param_samples = 50;
  int num_outcome_samples = 100;
  double multiplier = 2.0;  // predictive interval half-width in sd units
  DeferralConfig deferral;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  ModelConfig model;
  SensitivityConfig sensitivity;
  std::vector<std::uint64_t> seeds = {0};
  std::string output_dir = "out";
  int workers = 1;

  OutcomeModelSpec outcome_spec() const;
  PropensitySpec propensity_spec() const;
  TrainingOptions training_options(std::uint64_t seed) const;
  std::vector<double> gammas() const;
};

// Parses and validates a JSON document, filling dataset-specific defaults.
// Unknown keys are rejected. Throws ConfigError listing every problem.
ExperimentConfig validate_config(const std::string& json_text);

// Canonical JSON of a validated config (all defaults explicit).
std::string config_to_json(const ExperimentConfig& config);

}  // namespace cate

#endif  // CATE_CONFIG_HPP_
