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


#include "cate/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cate/errors.hpp"
#include "cate/format.hpp"
#include "cate/outcome_model.hpp"
#include "cate/policy.hpp"
#include "cate/propensity.hpp"
#include "cate/simulated.hpp"

namespace cate {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kSurrogateTableSeed = 0;

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string percent_label(double target) {
  return std::to_string(static_cast<int>(std::lround(target * 100.0)));
}

struct CellOutput {
  std::string intervals;
  std::vector<ReportRow> reports;
  std::optional<std::string> error;
};

}  // namespace

DataSources load_sources(const ExperimentConfig& config) {
  DataSources s;
  if (config.dataset.kind == DatasetKind::kHcmnist) {
    s.mnist_train = load_mnist(config.dataset.mnist_dir, true);
    s.mnist_test = load_mnist(config.dataset.mnist_dir, false);
  } else if (config.dataset.kind == DatasetKind::kIhdp) {
    s.ihdp_table = config.dataset.ihdp_csv.empty() ? surrogate_ihdp_table(kSurrogateTableSeed)
                                                   : read_ihdp_csv(config.dataset.ihdp_csv);
  }
  return s;
}

DatasetSplits generate_cell_data(const ExperimentConfig& config, const DataSources& sources,
                                 std::uint64_t seed, double log_gamma_star) {
  const DatasetConfig& d = config.dataset;
  switch (d.kind) {
    case DatasetKind::kSimulated:
      return generate_simulated_splits(d.n_train, d.n_valid, d.n_test, std::exp(log_gamma_star),
                                       seed);
    case DatasetKind::kHcmnist:
      if (!sources.mnist_train || !sources.mnist_test) throw StateError("MNIST files not loaded");
      return generate_hcmnist(*sources.mnist_train, *sources.mnist_test, d.n_train, d.n_valid,
                              d.n_test, std::exp(log_gamma_star), seed)
          .splits;
    case DatasetKind::kIhdp:
      if (!sources.ihdp_table) throw StateError("IHDP covariates not loaded");
      return generate_ihdp_hidden(*sources.ihdp_table, seed).splits;
  }
  throw StateError("unknown dataset kind");
}

TrainedCell train_cell(const ExperimentConfig& config, const DatasetSplits& data,
                       std::uint64_t seed) {
  TrainedCell cell;
  cell.models.outcome =
      OutcomeModel(data.train.dim(), config.outcome_spec(), derive_seed(seed, Stream::kModel, {100}));
  cell.outcome_history =
      fit_outcome_model(cell.models.outcome, data.train, data.valid,
                        config.training_options(derive_seed(seed, Stream::kModel, {101})));
  cell.models.propensity =
      fit_propensity(data.train, data.valid, config.propensity_spec(),
                     config.training_options(derive_seed(seed, Stream::kModel, {102})),
                     &cell.propensity_history);
  return cell;
}

TableOptions table_options(const ExperimentConfig& config, std::uint64_t seed, int workers) {
  TableOptions o;
  o.num_param_samples = config.sensitivity.num_param_samples;
  o.num_outcome_samples = config.sensitivity.num_outcome_samples;
  o.workers = workers;
  o.seed = derive_seed(seed, Stream::kModel, {103});
  return o;
}

std::vector<ReportRow> evaluate_cell(const ExperimentConfig& config, const Dataset& test,
                                     const IntervalTable& table, std::uint64_t seed,
                                     double log_gamma_star) {
  if (!test.has_potential_outcomes() || !test.has_true_cate()) {
    throw ContractError("evaluation needs potential outcomes and the true CATE");
  }
  if (table.num_points != test.size()) throw ShapeError("interval table and test set differ in size");
  const std::string dataset = to_string(config.dataset.kind);
  const std::vector<double> tau = to_std(test.true_cate);
  const double c = config.sensitivity.multiplier;
  std::vector<ReportRow> rows;
  auto add = [&](double log_gamma, const std::string& metric, double value) {
    rows.push_back({dataset, seed, log_gamma_star, log_gamma, metric, value});
  };

  const auto optimal = optimal_policy(tau);
  add(kNaN, "optimal_policy_risk", policy_risk(optimal, test.potential_outcomes));

  const auto& log_gammas = config.sensitivity.log_gammas;
  for (std::size_t g = 0; g < table.gammas.size(); ++g) {
    const double lg =
        log_gammas.size() == table.gammas.size() ? log_gammas[g] : std::log(table.gammas[g]);
    const auto predictive = table.predictive(g, c);
    std::vector<CateInterval> bounds(predictive.size());
    for (Eigen::Index i = 0; i < table.num_points; ++i) {
      bounds[static_cast<std::size_t>(i)] = table.at(i, g).mean_interval();
    }
    const auto policy = interval_policy(predictive);
    add(lg, "policy_risk", policy_risk(policy, test.potential_outcomes));
    add(lg, "policy_risk_error", policy_risk_error(policy, tau, test.potential_outcomes));
    add(lg, "policy_risk_error_bounds",
        policy_risk_error(interval_policy(bounds), tau, test.potential_outcomes));
    double covered = 0.0;
    double width = 0.0;
    for (std::size_t i = 0; i < predictive.size(); ++i) {
      covered += predictive[i].contains(tau[i]) ? 1.0 : 0.0;
      width += predictive[i].width();
    }
    const auto n = static_cast<double>(predictive.size());
    add(lg, "coverage", covered / n);
    add(lg, "mean_width", width / n);
    add(lg, "deferral_fraction", evaluate_deferral(predictive, tau).deferral_fraction);
  }

  if (config.sensitivity.deferral.enabled) {
    for (UncertaintyMode mode :
         {UncertaintyMode::kIgnorance, UncertaintyMode::kUncertainty, UncertaintyMode::kSensitivity}) {
      const auto curve = deferral_curve(table, tau, mode, config.sensitivity.deferral.multipliers);
      for (double target : kDeferralTargets) {
        const auto err = error_at_deferral(curve, target);
        add(kNaN, "error_at_deferral_" + to_string(mode) + "_" + percent_label(target),
            err ? *err : kNaN);
      }
    }
  }
  return rows;
}

std::string report_rows_csv(std::span<const ReportRow> rows) {
  std::ostringstream out;
  for (const ReportRow& r : rows) {
    out << r.dataset << ',' << r.seed << ',' << format_double(r.log_gamma_star) << ','
        << format_double(r.log_gamma) << ',' << r.metric << ',' << format_double(r.value) << '\n';
  }
  return out.str();
}

SeedSummary summarize(std::span<const double> values) {
  SeedSummary s;
  double sum = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) {
      sum += v;
      ++s.n;
    }
  }
  if (s.n == 0) {
    s.mean = kNaN;
    s.sd = kNaN;
    s.ci95 = kNaN;
    return s;
  }
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) {
      if (std::isfinite(v)) ss += (v - s.mean) * (v - s.mean);
    }
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  s.ci95 = 1.96 * s.sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

namespace {

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

std::string build_summary(const ExperimentConfig& config, const std::vector<double>& star_grid,
                          const std::vector<ReportRow>& rows,
                          const std::vector<CellFailure>& failures) {
  using OJson = nlohmann::ordered_json;
  // Group by (metric, log gamma*, log gamma) in first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ReportRow*>> groups;
  for (const ReportRow& r : rows) {
    const std::string key =
        r.metric + '|' + format_double(r.log_gamma_star) + '|' + format_double(r.log_gamma);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  auto stats_for = [&](const std::string& metric, double lgs, double lg) -> const std::vector<const ReportRow*>* {
    const auto it = groups.find(metric + '|' + format_double(lgs) + '|' + format_double(lg));
    return it == groups.end() ? nullptr : &it->second;
  };
  auto values_of = [](const std::vector<const ReportRow*>& g) {
    std::vector<double> v;
    for (const ReportRow* r : g) v.push_back(r->value);
    return v;
  };

  OJson doc;
  doc["dataset"] = to_string(config.dataset.kind);
  doc["seeds"] = config.seeds;
  OJson stars = OJson::array();
  for (double s : star_grid) stars.push_back(number_or_null(s));
  doc["log_gamma_stars"] = stars;
  doc["log_gammas"] = config.sensitivity.log_gammas;
  doc["multiplier"] = config.sensitivity.multiplier;

  OJson metrics = OJson::array();
  for (const std::string& key : order) {
    const auto& g = groups.at(key);
    const auto values = values_of(g);
    const SeedSummary s = summarize(values);
    OJson m;
    m["metric"] = g.front()->metric;
    m["log_gamma_star"] = number_or_null(g.front()->log_gamma_star);
    m["log_gamma"] = number_or_null(g.front()->log_gamma);
    m["n"] = s.n;
    m["mean"] = number_or_null(s.mean);
    m["sd"] = number_or_null(s.sd);
    m["ci95"] = number_or_null(s.ci95);
    metrics.push_back(m);
  }
  doc["metrics"] = metrics;

  std::string table_metric;
  double scale = 1.0;
  if (config.dataset.kind == DatasetKind::kSimulated) {
    table_metric = "policy_risk_error";
    scale = 100.0;
  } else if (config.dataset.kind == DatasetKind::kHcmnist) {
    table_metric = "policy_risk";
  }
  if (table_metric.empty()) {
    doc["table"] = nullptr;
  } else {
    OJson table;
    table["metric"] = table_metric;
    table["scale"] = scale;
    table["rows"] = "log_gamma_star";
    table["columns"] = "log_gamma";
    OJson mean = OJson::array();
    OJson ci = OJson::array();
    for (double lgs : star_grid) {
      OJson mrow = OJson::array();
      OJson crow = OJson::array();
      for (double lg : config.sensitivity.log_gammas) {
        const auto* g = stats_for(table_metric, lgs, lg);
        const SeedSummary s = g ? summarize(values_of(*g)) : summarize({});
        mrow.push_back(number_or_null(s.mean * scale));
        crow.push_back(number_or_null(s.ci95 * scale));
      }
      mean.push_back(mrow);
      ci.push_back(crow);
    }
    table["mean"] = mean;
    table["ci95"] = ci;
    doc["table"] = table;
  }

  if (config.sensitivity.deferral.enabled) {
    OJson deferral;
    deferral["sweep"] =
        "reconstructed: ignorance sweeps the sd multiplier at gamma 1 then log gamma at the "
        "largest multiplier; uncertainty sweeps the multiplier at gamma 1; sensitivity sweeps "
        "gamma with no variance term";
    deferral["targets"] = std::vector<double>(std::begin(kDeferralTargets), std::end(kDeferralTargets));
    for (UncertaintyMode mode :
         {UncertaintyMode::kIgnorance, UncertaintyMode::kUncertainty, UncertaintyMode::kSensitivity}) {
      OJson mean = OJson::array();
      OJson ci = OJson::array();
      for (double target : kDeferralTargets) {
        const auto* g = stats_for("error_at_deferral_" + to_string(mode) + "_" + percent_label(target),
                                  star_grid.empty() ? kNaN : star_grid.front(), kNaN);
        const SeedSummary s = g ? summarize(values_of(*g)) : summarize({});
        mean.push_back(number_or_null(s.mean));
        ci.push_back(number_or_null(s.ci95));
      }
      deferral[to_string(mode)]["mean"] = mean;
      deferral[to_string(mode)]["ci95"] = ci;
    }
    doc["deferral"] = deferral;
  }

  OJson fails = OJson::array();
  for (const CellFailure& f : failures) {
    OJson j;
    j["seed"] = f.seed;
    j["log_gamma_star"] = number_or_null(f.log_gamma_star);
    j["error"] = f.error;
    fails.push_back(j);
  }
  doc["failures"] = fails;
  doc["config"] = OJson::parse(config_to_json(config));
  return doc.dump(2) + "\n";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const LogFn& log) {
  std::mutex log_mutex;
  auto say = [&](const std::string& line) {
    if (!log) return;
    std::lock_guard<std::mutex> lock(log_mutex);
    log(line);
  };

  const bool ihdp = config.dataset.kind == DatasetKind::kIhdp;
  const std::vector<double> star_grid = ihdp ? std::vector<double>{kNaN} : config.dataset.log_gamma_stars;
  struct Cell {
    std::uint64_t seed;
    double log_gamma_star;
  };
  std::vector<Cell> cells;
  for (std::uint64_t seed : config.seeds) {
    for (double lgs : star_grid) cells.push_back({seed, lgs});
  }

  say("loading data sources for " + to_string(config.dataset.kind));
  const DataSources sources = load_sources(config);
  const std::vector<double> gammas = config.gammas();
  const int cell_workers = std::max(1, std::min<int>(config.workers, static_cast<int>(cells.size())));
  const int table_workers = cell_workers == 1 ? config.workers : 1;

  std::vector<CellOutput> outputs(cells.size());
  auto run_cell = [&](std::size_t i) {
    const Cell& cell = cells[i];
    const std::string tag =
        "seed " + std::to_string(cell.seed) + " log_gamma_star " + format_double(cell.log_gamma_star);
    try {
      const DatasetSplits data = generate_cell_data(config, sources, cell.seed, cell.log_gamma_star);
      const TrainedCell trained = train_cell(config, data, cell.seed);
      say(tag + ": outcome model best epoch " + std::to_string(trained.outcome_history.best_epoch) +
          " of " + std::to_string(trained.outcome_history.epochs_run) +
          ", propensity best epoch " + std::to_string(trained.propensity_history.best_epoch) +
          " of " + std::to_string(trained.propensity_history.epochs_run));
      const TableResult tr = compute_interval_table(trained.models, data.test.covariates, gammas,
                                                    table_options(config, cell.seed, table_workers));
      outputs[i].intervals = interval_rows_csv(
          tr.table, std::to_string(cell.seed) + "," + format_double(cell.log_gamma_star) + ",",
          config.sensitivity.multiplier);
      outputs[i].reports = evaluate_cell(config, data.test, tr.table, cell.seed, cell.log_gamma_star);
      say(tag + ": done");
    } catch (const std::exception& e) {
      outputs[i].error = e.what();
      outputs[i].intervals.clear();
      outputs[i].reports.clear();
      say(tag + ": failed: " + e.what());
    }
  };

  if (cell_workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int k = 0; k < cell_workers; ++k) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  ExperimentResult result;
  std::string intervals = std::string("seed,log_gamma_star,") + kIntervalColumns + "\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    intervals += outputs[i].intervals;
    result.reports.insert(result.reports.end(), outputs[i].reports.begin(), outputs[i].reports.end());
    if (outputs[i].error) result.failures.push_back({cells[i].seed, cells[i].log_gamma_star, *outputs[i].error});
  }
  result.intervals_csv = std::move(intervals);
  result.reports_csv = std::string(kReportColumns) + "\n" + report_rows_csv(result.reports);
  result.summary_json = build_summary(config, star_grid, result.reports, result.failures);
  return result;
}

void write_experiment(const ExperimentResult& result, const std::string& dir) {
  const std::filesystem::path root(dir);
  write_file((root / "intervals.csv").string(), result.intervals_csv);
  write_file((root / "reports.csv").string(), result.reports_csv);
  write_file((root / "summary.json").string(), result.summary_json);
}

}  // namespace cate
