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


// cate: data generation, model fitting, interval tables and policy reports.
//
//   cate generate --config c.json --seed 3 --log-gamma-star 1 --out data/
//   cate train    --config c.json --seed 3 --data data/ --out models/
//   cate bounds   --config c.json --seed 3 --models models/ --data data/test.csv
//                 --gamma 1,2.718 --out intervals.csv
//   cate evaluate --config c.json --seed 3 --intervals intervals.csv
//                 --data data/test.csv --out reports.csv
//   cate run      --config c.json [--seed 3] [--out dir]
//   cate validate --config c.json

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cate/config.hpp"
#include "cate/dataset.hpp"
#include "cate/errors.hpp"
#include "cate/experiment.hpp"
#include "cate/format.hpp"
#include "cate/interval_table.hpp"
#include "cate/outcome_model.hpp"
#include "cate/propensity.hpp"

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
};

cate::ExperimentConfig load_config(const Common& c) {
  return cate::validate_config(c.config_path.empty() ? std::string() : cate::read_file(c.config_path));
}

void log_line(const std::string& line) { std::cerr << "[cate] " << line << std::endl; }

std::string path_in(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

int cmd_generate(const Common& c, double log_gamma_star) {
  const cate::ExperimentConfig config = load_config(c);
  const cate::DataSources sources = cate::load_sources(config);
  if (config.dataset.kind == cate::DatasetKind::kIhdp) log_gamma_star = std::numeric_limits<double>::quiet_NaN();
  const auto splits = cate::generate_cell_data(config, sources, c.seed, log_gamma_star);
  const std::string out = c.out.empty() ? "data" : c.out;
  for (const auto& [name, data] : {std::pair{"train", &splits.train}, std::pair{"valid", &splits.valid},
                                   std::pair{"test", &splits.test}}) {
    cate::write_dataset_csv(*data, path_in(out, name) + ".csv");
    cate::write_dataset_sidecar(*data, path_in(out, name) + ".json");
  }
  log_line("wrote " + std::to_string(splits.train.size()) + "/" + std::to_string(splits.valid.size()) + "/" +
           std::to_string(splits.test.size()) + " rows to " + out);
  return 0;
}

int cmd_train(const Common& c, const std::string& data_dir) {
  const cate::ExperimentConfig config = load_config(c);
  cate::DatasetSplits splits;
  splits.train = cate::read_dataset_csv(path_in(data_dir, "train.csv"));
  const std::string valid = path_in(data_dir, "valid.csv");
  if (fs::exists(valid)) splits.valid = cate::read_dataset_csv(valid);
  const cate::TrainedCell cell = cate::train_cell(config, splits, c.seed);
  const std::string out = c.out.empty() ? "models" : c.out;
  cate::write_file(path_in(out, "outcome_model.json"), cate::to_checkpoint(cell.models.outcome));
  cate::write_file(path_in(out, "propensity_model.json"), cate::to_checkpoint(cell.models.propensity));
  log_line("outcome model: best epoch " + std::to_string(cell.outcome_history.best_epoch) + " of " +
           std::to_string(cell.outcome_history.epochs_run));
  log_line("propensity model: best epoch " + std::to_string(cell.propensity_history.best_epoch) + " of " +
           std::to_string(cell.propensity_history.epochs_run));
  return 0;
}

int cmd_bounds(const Common& c, const std::string& models_dir, const std::string& data_path,
               std::vector<double> gammas, int workers) {
  const cate::ExperimentConfig config = load_config(c);
  cate::FittedModels models{
      cate::outcome_model_from_checkpoint(cate::read_file(path_in(models_dir, "outcome_model.json"))),
      cate::propensity_model_from_checkpoint(cate::read_file(path_in(models_dir, "propensity_model.json")))};
  const cate::Dataset data = cate::read_dataset_csv(data_path);
  if (gammas.empty()) gammas = config.gammas();
  for (double g : gammas) {
    if (!(g >= 1.0)) throw cate::DomainError("--gamma values must be >= 1");
  }
  const auto result = cate::compute_interval_table(models, data.covariates, gammas,
                                                   cate::table_options(config, c.seed, workers));
  const std::string text = std::string(cate::kIntervalColumns) + "\n" +
                           cate::interval_rows_csv(result.table, "", config.sensitivity.multiplier);
  cate::write_file(c.out.empty() ? "intervals.csv" : c.out, text);
  log_line("interval table: " + std::to_string(result.table.num_points) + " points x " +
           std::to_string(gammas.size()) + " gammas");
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& intervals_path, const std::string& data_path) {
  const cate::ExperimentConfig config = load_config(c);
  const cate::IntervalTable table = cate::parse_interval_csv(cate::read_file(intervals_path));
  const cate::Dataset data = cate::read_dataset_csv(data_path);
  const double lgs = config.dataset.kind == cate::DatasetKind::kIhdp ? std::numeric_limits<double>::quiet_NaN()
                                                                     : std::log(data.gamma_star);
  const auto rows = cate::evaluate_cell(config, data, table, c.seed, lgs);
  cate::write_file(c.out.empty() ? "reports.csv" : c.out,
                   std::string(cate::kReportColumns) + "\n" + cate::report_rows_csv(rows));
  return 0;
}

int cmd_run(const Common& c, int workers) {
  cate::ExperimentConfig config = load_config(c);
  if (c.seed_given) config.seeds = {c.seed};
  if (!c.out.empty()) config.output_dir = c.out;
  if (workers > 0) config.workers = workers;
  const cate::ExperimentResult result = cate::run_experiment(config, log_line);
  cate::write_experiment(result, config.output_dir);
  log_line("wrote intervals.csv, reports.csv and summary.json to " + config.output_dir);
  for (const auto& f : result.failures) {
    log_line("failed cell: seed " + std::to_string(f.seed) + " log_gamma_star " +
             cate::format_double(f.log_gamma_star) + ": " + f.error);
  }
  return result.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds on conditional average treatment effects under hidden confounding"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--config", common.config_path, "JSON configuration (defaults when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { common.seed = s; common.seed_given = true; }, "base seed");
    if (with_out) sub->add_option("--out", common.out, "output path");
  };

  double log_gamma_star = 0.0;
  auto* gen = app.add_subcommand("generate", "write train/valid/test CSVs with JSON sidecars");
  add_common(gen, true);
  gen->add_option("--log-gamma-star", log_gamma_star, "true confounding level (log scale)")
      ->check(CLI::NonNegativeNumber);

  std::string data_dir;
  auto* train = app.add_subcommand("train", "fit the outcome and propensity models");
  add_common(train, true);
  train->add_option("--data", data_dir, "directory holding train.csv and valid.csv")->required();

  std::string models_dir, data_path, intervals_path;
  std::vector<double> gammas;
  int workers = 0;
  auto* bounds = app.add_subcommand("bounds", "interval table for every row of a dataset");
  add_common(bounds, true);
  bounds->add_option("--models", models_dir, "directory holding the model checkpoints")->required();
  bounds->add_option("--data", data_path, "dataset CSV")->required()->check(CLI::ExistingFile);
  bounds->add_option("--gamma", gammas, "gamma values (>= 1), comma separated")->delimiter(',');
  bounds->add_option("--workers", workers, "threads over parameter draws")->check(CLI::PositiveNumber);

  auto* evaluate = app.add_subcommand("evaluate", "policy and deferral metrics for an interval table");
  add_common(evaluate, true);
  evaluate->add_option("--intervals", intervals_path, "interval table CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--data", data_path, "dataset CSV with ground truth")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "full pipeline over every seed and confounding level");
  add_common(run, true);
  run->add_option("--workers", workers, "cells run concurrently")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "print the fully defaulted configuration");
  add_common(validate, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_generate(common, log_gamma_star);
    if (*train) return cmd_train(common, data_dir);
    if (*bounds) return cmd_bounds(common, models_dir, data_path, gammas, workers > 0 ? workers : 1);
    if (*evaluate) return cmd_evaluate(common, intervals_path, data_path);
    if (*run) return cmd_run(common, workers);
    if (*validate) {
      std::cout << cate::config_to_json(load_config(common)) << std::endl;
      return 0;
    }
  } catch (const cate::ConfigError& e) {
    std::cerr << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
