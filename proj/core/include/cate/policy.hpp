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

// Policies built from CATE intervals and their evaluation against synthetic
// ground truth.
//
// Two conventions coexist. For policy risk, outcomes are costs: treating is
// optimal where tau(x) < 0 and the interval policy treats only when the
// whole interval is <= 0. For deferral, outcomes are benefits: treatment is
// recommended where tau(x) > 0, and a unit is deferred when its interval
// contains 0 (ties defer).

#ifndef CATE_POLICY_HPP_
#define CATE_POLICY_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cate/msm.hpp"

namespace cate {

enum class Action { kControl = 0, kTreat = 1, kDefer = 2 };

// Treat iff upper <= 0, otherwise `default_action`.
std::vector<Action> interval_policy(std::span<const CateInterval> intervals,
                                    Action default_action = Action::kControl);

// Treat iff tau < 0.
std::vector<Action> optimal_policy(std::span<const double> true_cate);

// Mean selected potential outcome. potential_outcomes is n x 2 (Y0, Y1).
// Throws ContractError if any action is kDefer, ShapeError on length mismatch.
double policy_risk(std::span<const Action> policy, const Eigen::MatrixXd& potential_outcomes);

// (V(policy) - V(optimal))^2 with the optimal policy taken from true_cate.
double policy_risk_error(std::span<const Action> policy, std::span<const double> true_cate,
                         const Eigen::MatrixXd& potential_outcomes);

struct DeferralPoint {
  double sweep_value = 0.0;  // gamma or standard-deviation multiplier
  double gamma = 1.0;
  double multiplier = 0.0;
  double deferral_fraction = 0.0;
  std::optional<double> error_rate;  // empty when every unit is deferred
};

// Deferral fraction and recommendation error on the non-deferred units:
// error counts disagreements between 1(tau > 0) and 1(lower > 0).
DeferralPoint evaluate_deferral(std::span<const CateInterval> intervals,
                                std::span<const double> true_cate);

enum class UncertaintyMode {
  kIgnorance,    // epistemic spread and confounding
  kUncertainty,  // epistemic spread only (gamma = 1)
  kSensitivity,  // confounding only (multiplier 0)
};

std::string to_string(UncertaintyMode mode);

struct IntervalTable;

// Deferral curve for one mode, ordered along the sweep. table.gammas[0] must
// be 1 and the gammas must increase.
//  - uncertainty: gamma = 1, multiplier over `multipliers`;
//  - sensitivity: multiplier 0, gamma over the table grid;
//  - ignorance: gamma = 1 while the multiplier rises through `multipliers`,
//    then the last multiplier with gamma rising over the rest of the grid.
std::vector<DeferralPoint> deferral_curve(const IntervalTable& table,
                                          std::span<const double> true_cate,
                                          UncertaintyMode mode,
                                          std::span<const double> multipliers);

// Error rate at a target deferral fraction, linearly interpolated between the
// two curve points that bracket it (curve ordered by sweep). Empty when the
// target is not bracketed by points with defined error.
std::optional<double> error_at_deferral(std::span<const DeferralPoint> curve, double target);

}  // namespace cate

#endif  // CATE_POLICY_HPP_
