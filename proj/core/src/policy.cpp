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

#include "cate/policy.hpp"

#include <cmath>

#include "cate/errors.hpp"
#include "cate/interval_table.hpp"

namespace cate {

std::vector<Action> interval_policy(std::span<const CateInterval> intervals,
                                    Action default_action) {
  std::vector<Action> out;
  out.reserve(intervals.size());
  for (const auto& iv : intervals) out.push_back(iv.upper <= 0.0 ? Action::kTreat : default_action);
  return out;
}

std::vector<Action> optimal_policy(std::span<const double> true_cate) {
  std::vector<Action> out;
  out.reserve(true_cate.size());
  for (double tau : true_cate) out.push_back(tau < 0.0 ? Action::kTreat : Action::kControl);
  return out;
}

double policy_risk(std::span<const Action> policy, const Eigen::MatrixXd& potential_outcomes) {
  if (potential_outcomes.cols() != 2 ||
      potential_outcomes.rows() != static_cast<Eigen::Index>(policy.size())) {
    throw ShapeError("policy and potential outcomes differ in length");
  }
  if (policy.empty()) throw ShapeError("policy_risk of an empty policy");
  double total = 0.0;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    if (policy[i] == Action::kDefer) {
      throw ContractError("policy_risk is undefined for deferred units (row " +
                          std::to_string(i) + ")");
    }
    total += potential_outcomes(static_cast<Eigen::Index>(i), policy[i] == Action::kTreat ? 1 : 0);
  }
  return total / static_cast<double>(policy.size());
}

double policy_risk_error(std::span<const Action> policy, std::span<const double> true_cate,
                         const Eigen::MatrixXd& potential_outcomes) {
  const auto best = optimal_policy(true_cate);
  const double gap = policy_risk(policy, potential_outcomes) - policy_risk(best, potential_outcomes);
  return gap * gap;
}

DeferralPoint evaluate_deferral(std::span<const CateInterval> intervals,
                                std::span<const double> true_cate) {
  if (intervals.size() != true_cate.size()) throw ShapeError("intervals and true CATE differ in length");
  if (intervals.empty()) throw ShapeError("deferral on an empty set");
  std::size_t deferred = 0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].lower <= 0.0 && 0.0 <= intervals[i].upper) {
      ++deferred;
      continue;
    }
    const bool recommended = intervals[i].lower > 0.0;
    const bool beneficial = true_cate[i] > 0.0;
    if (recommended != beneficial) ++errors;
  }
  DeferralPoint p;
  p.deferral_fraction = static_cast<double>(deferred) / static_cast<double>(intervals.size());
  if (deferred < intervals.size()) {
    p.error_rate = static_cast<double>(errors) / static_cast<double>(intervals.size() - deferred);
  }
  return p;
}

std::string to_string(UncertaintyMode mode) {
  switch (mode) {
    case UncertaintyMode::kIgnorance:
      return "ignorance";
    case UncertaintyMode::kUncertainty:
      return "uncertainty";
    case UncertaintyMode::kSensitivity:
      return "sensitivity";
  }
  return "unknown";
}

std::vector<DeferralPoint> deferral_curve(const IntervalTable& table,
                                          std::span<const double> true_cate,
                                          UncertaintyMode mode,
                                          std::span<const double> multipliers) {
  if (table.gammas.empty() || table.gammas.front() != 1.0) {
    throw ContractError("deferral sweeps need gamma = 1 as the first grid value");
  }
  for (std::size_t g = 1; g < table.gammas.size(); ++g) {
    if (!(table.gammas[g] > table.gammas[g - 1])) throw ContractError("gamma grid must increase");
  }
  if (mode != UncertaintyMode::kSensitivity && multipliers.empty()) {
    throw ContractError("multiplier sweep is empty");
  }
  std::vector<DeferralPoint> curve;
  auto add = [&](std::size_t g, double c, double sweep) {
    const auto intervals = table.predictive(g, c);
    DeferralPoint p = evaluate_deferral(intervals, true_cate);
    p.gamma = table.gammas[g];
    p.multiplier = c;
    p.sweep_value = sweep;
    curve.push_back(p);
  };
  switch (mode) {
    case UncertaintyMode::kUncertainty:
      for (double c : multipliers) add(0, c, c);
      break;
    case UncertaintyMode::kSensitivity:
      for (std::size_t g = 0; g < table.gammas.size(); ++g) add(g, 0.0, table.gammas[g]);
      break;
    case UncertaintyMode::kIgnorance: {
      // Sweep coordinate: multiplier first, then multiplier max + log gamma.
      for (double c : multipliers) add(0, c, c);
      const double c = multipliers.back();
      for (std::size_t g = 1; g < table.gammas.size(); ++g) add(g, c, c + std::log(table.gammas[g]));
      break;
    }
  }
  return curve;
}

std::optional<double> error_at_deferral(std::span<const DeferralPoint> curve, double target) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const DeferralPoint& a = curve[i];
    if (!a.error_rate) continue;
    if (a.deferral_fraction == target) return a.error_rate;
    if (i + 1 < curve.size()) {
      const DeferralPoint& b = curve[i + 1];
      if (b.error_rate && a.deferral_fraction < target && target <= b.deferral_fraction) {
        const double w = (target - a.deferral_fraction) / (b.deferral_fraction - a.deferral_fraction);
        return *a.error_rate + w * (*b.error_rate - *a.error_rate);
      }
    }
  }
  return std::nullopt;
}

}  // namespace cate
