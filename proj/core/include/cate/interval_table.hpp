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

// Batch evaluation of the bounds over query points and a gamma grid.

#ifndef CATE_INTERVAL_TABLE_HPP_
#define CATE_INTERVAL_TABLE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cate/msm.hpp"

namespace cate {

struct IntervalTable {
  std::vector<double> gammas;
  Eigen::Index num_points = 0;
  std::vector<IntervalStats> stats;  // point-major: stats[x * gammas.size() + g]

  const IntervalStats& at(Eigen::Index x, std::size_t g) const {
    return stats[static_cast<std::size_t>(x) * gammas.size() + g];
  }

  // Predictive intervals of every point at gamma index g.
  std::vector<CateInterval> predictive(std::size_t g, double multiplier = 2.0) const;
};

struct TableOptions {
  int num_param_samples = 50;
  int num_outcome_samples = 100;
  int workers = 1;                // threads across omega draws
  std::uint64_t seed = 0;
  bool keep_per_omega = false;    // also return per-omega bounds
};

struct TableResult {
  IntervalTable table;
  // per_omega[w][x * gammas.size() + g], filled when requested.
  std::vector<std::vector<OmegaBounds>> per_omega;
};

// Same draws (masks and outcome samples) are reused for every gamma, so the
// per-omega intervals are nested across the grid. Output does not depend on
// `workers`.
TableResult compute_interval_table(const FittedModels& models, const Eigen::MatrixXd& x,
                                   const std::vector<double>& gammas,
                                   const TableOptions& options);

inline constexpr const char* kIntervalColumns =
    "x_index,gamma,tau_lower_mean,tau_upper_mean,tau_lower_var,tau_upper_var,"
    "predictive_lower,predictive_upper";

// CSV rows (no header) in point-major order; each row starts with `prefix`
// (e.g. "3,0.5," for seed and log gamma star columns) when non-empty.
std::string interval_rows_csv(const IntervalTable& table, const std::string& prefix = "",
                              double multiplier = 2.0);

// Reads a header line equal to kIntervalColumns followed by rows in the order
// interval_rows_csv writes them. Arm-level means are not stored and read as 0.
// Throws IngestionError with the line number.
IntervalTable parse_interval_csv(const std::string& text);

}  // namespace cate

#endif  // CATE_INTERVAL_TABLE_HPP_
