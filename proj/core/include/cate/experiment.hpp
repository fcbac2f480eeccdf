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


// End-to-end runs: one cell per (seed, log gamma*) pair generates data, trains
// the outcome and propensity models, computes the interval table on the test
// split and evaluates policies. Cells run in a worker pool and are merged in
// seed order, so artifacts are byte-identical across runs and worker counts.

#ifndef CATE_EXPERIMENT_HPP_
#define CATE_EXPERIMENT_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cate/config.hpp"
#include "cate/dataset.hpp"
#include "cate/ihdp.hpp"
#include "cate/interval_table.hpp"
#include "cate/mnist.hpp"
#include "cate/msm.hpp"

namespace cate {

using LogFn = std::function<void(const std::string&)>;

// Files shared by every cell, loaded once.
struct DataSources {
  std::optional<MnistSplit> mnist_train;
  std::optional<MnistSplit> mnist_test;
  std::optional<IhdpTable> ihdp_table;
};

DataSources load_sources(const ExperimentConfig& config);

// log_gamma_star is ignored (pass NaN) for ihdp.
DatasetSplits generate_cell_data(const ExperimentConfig& config, const DataSources& sources,
                                 std::uint64_t seed, double log_gamma_star);

struct TrainedCell {
  FittedModels models;
  TrainingHistory outcome_history;
  TrainingHistory propensity_history;
};

TrainedCell train_cell(const ExperimentConfig& config, const DatasetSplits& data,
                       std::uint64_t seed);

TableOptions table_options(const ExperimentConfig& config, std::uint64_t seed, int workers);

struct ReportRow {
  std::string dataset;
  std::uint64_t seed = 0;
  double log_gamma_star = 0.0;  // NaN for ihdp
  double log_gamma = 0.0;       // NaN for metrics that do not depend on gamma
  std::string metric;
  double value = 0.0;
};

inline constexpr const char* kReportColumns = "dataset,seed,log_gamma_star,log_gamma,metric,value";

// Deferral targets reported as error_at_deferral_<mode>_<percent>.
inline constexpr double kDeferralTargets[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

// Metrics per gamma: policy_risk, policy_risk_error, policy_risk_error_bounds
// (mean interval without the variance term), coverage, mean_width,
// deferral_fraction. Per cell: optimal_policy_risk and, when deferral is
// enabled, the error_at_deferral rows. `test` needs potential outcomes and
// the true CATE.
std::vector<ReportRow> evaluate_cell(const ExperimentConfig& config, const Dataset& test,
                                     const IntervalTable& table, std::uint64_t seed,
                                     double log_gamma_star);

std::string report_rows_csv(std::span<const ReportRow> rows);

struct CellFailure {
  std::uint64_t seed = 0;
  double log_gamma_star = 0.0;
  std::string error;
};

struct ExperimentResult {
  std::string intervals_csv;
  std::string reports_csv;
  std::string summary_json;
  std::vector<ReportRow> reports;
  std::vector<CellFailure> failures;

  int exit_code() const { return failures.empty() ? 0 : 1; }
};

// A failing cell is recorded and the others continue.
ExperimentResult run_experiment(const ExperimentConfig& config, const LogFn& log = {});

// Writes intervals.csv, reports.csv and summary.json into `dir`.
void write_experiment(const ExperimentResult& result, const std::string& dir);

// Mean, sd and 1.96 sd / sqrt(n) over the finite values.
struct SeedSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double ci95 = 0.0;
};

SeedSummary summarize(std::span<const double> values);

}  // namespace cate

#endif  // CATE_EXPERIMENT_HPP_
