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


#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "cate/config.hpp"
#include "cate/errors.hpp"
#include "cate/experiment.hpp"
#include "cate/interval_table.hpp"

using namespace cate;

namespace {

const char* kSmall = R"({
  "dataset": {"kind": "simulated", "n_train": 200, "n_valid": 50, "n_test": 60,
              "log_gamma_star": [0.5, 1.0, 1.5]},
  "model": {"hidden": [16, 16], "components": 2, "max_epochs": 4, "patience": 4},
  "sensitivity": {"log_gammas": [0.5, 1.0, 1.5], "num_param_samples": 4, "num_outcome_samples": 20},
  "seeds": [0, 1]
})";

std::filesystem::path scratch() {
  const char* env = std::getenv("CATE_TEST_TMP");
  const auto dir = std::filesystem::path(env ? env : std::filesystem::temp_directory_path().string()) /
                   "cate_test_experiment";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("seed summaries skip missing values") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> v = {1.0, 2.0, nan, 3.0};
  const SeedSummary s = summarize(v);
  CHECK(s.n == 3);
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.sd == doctest::Approx(1.0));
  CHECK(s.ci95 == doctest::Approx(1.96 / std::sqrt(3.0)));
  const std::vector<double> one = {4.0};
  CHECK(summarize(one).sd == 0.0);
}

TEST_CASE("cell evaluation on a handcrafted table") {
  ExperimentConfig config = validate_config(R"({"sensitivity": {"log_gammas": [0.0]}})");
  Dataset test;
  test.covariates = Eigen::MatrixXd::Zero(1, 3);
  test.treatments = Eigen::VectorXd::Zero(3);
  test.potential_outcomes.resize(3, 2);
  test.potential_outcomes << 1.0, 0.0, 0.0, 2.0, 1.0, 1.5;
  test.outcomes = test.potential_outcomes.col(0);
  test.true_cate = Eigen::Vector3d(-1.0, 2.0, 0.5);
  IntervalTable table;
  table.gammas = {1.0};
  table.num_points = 3;
  for (auto [lo, hi] : {std::pair{-1.5, -0.5}, std::pair{-0.5, 0.5}, std::pair{-0.2, -0.1}}) {
    IntervalStats s;
    s.lower_mean = lo;
    s.upper_mean = hi;
    table.stats.push_back(s);
  }
  const auto rows = evaluate_cell(config, test, table, 3, 0.0);
  auto value = [&](const std::string& metric) {
    for (const auto& r : rows) {
      if (r.metric == metric) return r.value;
    }
    FAIL("missing metric " << metric);
    return 0.0;
  };
  // Optimal treats only the first unit: (0 + 0 + 1) / 3.
  CHECK(value("optimal_policy_risk") == doctest::Approx(1.0 / 3.0));
  // Interval policy treats units 1 and 3: (0 + 0 + 1.5) / 3.
  CHECK(value("policy_risk") == doctest::Approx(0.5));
  CHECK(value("policy_risk_error") == doctest::Approx((0.5 - 1.0 / 3.0) * (0.5 - 1.0 / 3.0)));
  CHECK(value("coverage") == doctest::Approx(1.0 / 3.0));
  CHECK(value("mean_width") == doctest::Approx((1.0 + 1.0 + 0.1) / 3.0));
  CHECK(value("deferral_fraction") == doctest::Approx(1.0 / 3.0));
  test.true_cate.resize(0);
  CHECK_THROWS_AS(evaluate_cell(config, test, table, 3, 0.0), ContractError);
}

TEST_CASE("small experiment writes deterministic artifacts") {
  const ExperimentConfig config = validate_config(kSmall);
  const ExperimentResult a = run_experiment(config);
  CHECK(a.failures.empty());
  CHECK(a.exit_code() == 0);

  const auto j = nlohmann::json::parse(a.summary_json);
  CHECK(j["dataset"] == "simulated");
  REQUIRE(j["table"].is_object());
  CHECK(j["table"]["metric"] == "policy_risk_error");
  CHECK(j["table"]["scale"] == 100);
  REQUIRE(j["table"]["mean"].size() == 3);
  for (const auto& row : j["table"]["mean"]) CHECK(row.size() == 3);

  // Rows: header plus seeds x stars x (points x gammas).
  std::size_t lines = 0;
  for (char ch : a.intervals_csv) lines += ch == '\n';
  CHECK(lines == 1 + 2 * 3 * 60 * 3);
  CHECK(a.intervals_csv.rfind(std::string("seed,log_gamma_star,") + kIntervalColumns, 0) == 0);
  CHECK(a.reports_csv.rfind(kReportColumns, 0) == 0);

  ExperimentConfig threaded = config;
  threaded.workers = 3;
  const ExperimentResult b = run_experiment(threaded);
  CHECK(b.intervals_csv == a.intervals_csv);
  CHECK(b.reports_csv == a.reports_csv);

  const auto dir = scratch();
  write_experiment(a, dir.string());
  CHECK(slurp(dir / "intervals.csv") == a.intervals_csv);
  CHECK(slurp(dir / "reports.csv") == a.reports_csv);
  CHECK(slurp(dir / "summary.json") == a.summary_json);
}

TEST_CASE("stepwise pipeline reproduces a cell of the batch run") {
  ExperimentConfig config = validate_config(kSmall);
  config.seeds = {1};
  config.dataset.log_gamma_stars = {1.0};
  const ExperimentResult batch = run_experiment(config);
  REQUIRE(batch.failures.empty());

  const auto dir = scratch();
  const DataSources sources = load_sources(config);
  const DatasetSplits data = generate_cell_data(config, sources, 1, 1.0);
  // Persist and reload, as the command line tool does between verbs.
  write_dataset_csv(data.train, (dir / "train.csv").string());
  write_dataset_csv(data.valid, (dir / "valid.csv").string());
  write_dataset_csv(data.test, (dir / "test.csv").string());
  DatasetSplits loaded;
  loaded.train = read_dataset_csv((dir / "train.csv").string());
  loaded.valid = read_dataset_csv((dir / "valid.csv").string());
  loaded.test = read_dataset_csv((dir / "test.csv").string());
  const TrainedCell cell = train_cell(config, loaded, 1);
  const TableResult table =
      compute_interval_table(cell.models, loaded.test.covariates, config.gammas(), table_options(config, 1, 1));
  const auto rows = evaluate_cell(config, loaded.test, table.table, 1, 1.0);
  CHECK(std::string(kReportColumns) + "\n" + report_rows_csv(rows) == batch.reports_csv);
}

TEST_CASE("a failing cell is recorded") {
  ExperimentConfig config = validate_config(kSmall);
  config.seeds = {0};
  config.dataset.log_gamma_stars = {1.0};
  config.model.learning_rate = std::numeric_limits<double>::infinity();
  const ExperimentResult r = run_experiment(config);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.exit_code() == 1);
  CHECK_FALSE(r.failures[0].error.empty());
  const auto j = nlohmann::json::parse(r.summary_json);
  CHECK(j["failures"].size() == 1);
}
