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


#include <algorithm>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "cate/errors.hpp"
#include "cate/interval_table.hpp"
#include "cate/policy.hpp"

using namespace cate;

namespace {

IntervalStats stats(double lo, double hi, double lo_var = 0.0, double hi_var = 0.0) {
  IntervalStats s;
  s.lower_mean = lo;
  s.upper_mean = hi;
  s.lower_var = lo_var;
  s.upper_var = hi_var;
  return s;
}

}  // namespace

TEST_CASE("interval policy treats only when the upper bound is non-positive") {
  const std::vector<CateInterval> iv = {{-2.0, -0.5}, {-0.5, 0.5}, {-1.0, 0.0}, {0.1, 0.3}};
  const auto p = interval_policy(iv);
  CHECK(p[0] == Action::kTreat);
  CHECK(p[1] == Action::kControl);
  CHECK(p[2] == Action::kTreat);
  CHECK(p[3] == Action::kControl);
  CHECK(interval_policy(iv, Action::kDefer)[1] == Action::kDefer);

  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double a = 4.0 * uniform01(rng) - 2.0, b = 4.0 * uniform01(rng) - 2.0;
    const CateInterval c{std::min(a, b), std::max(a, b)};
    // Case analysis: entirely non-positive, straddling, or entirely positive.
    const Action expected = c.upper <= 0.0 ? Action::kTreat : Action::kControl;
    CHECK(interval_policy(std::span<const CateInterval>(&c, 1))[0] == expected);
  }
}

TEST_CASE("policy risk on a toy set") {
  Eigen::MatrixXd po(5, 2);
  po << 1.0, 2.0, 3.0, 0.0, -1.0, 4.0, 2.0, 2.0, 0.5, -0.5;
  const std::vector<Action> treat(5, Action::kTreat), control(5, Action::kControl);
  CHECK(policy_risk(treat, po) == doctest::Approx(po.col(1).mean()));
  CHECK(policy_risk(control, po) == doctest::Approx(po.col(0).mean()));
  const std::vector<Action> mixed = {Action::kTreat, Action::kTreat, Action::kControl, Action::kControl,
                                     Action::kTreat};
  CHECK(policy_risk(mixed, po) == doctest::Approx((2.0 + 0.0 - 1.0 + 2.0 - 0.5) / 5.0));
  const std::vector<Action> deferred = {Action::kDefer, Action::kTreat, Action::kTreat, Action::kTreat,
                                        Action::kTreat};
  CHECK_THROWS_AS(policy_risk(deferred, po), ContractError);
  CHECK_THROWS_AS(policy_risk(std::vector<Action>(3, Action::kTreat), po), ShapeError);
}

TEST_CASE("policy risk error") {
  Rng rng(2);
  const int n = 200;
  Eigen::MatrixXd po(n, 2);
  std::vector<double> tau(n);
  for (int i = 0; i < n; ++i) {
    po(i, 0) = 2.0 * uniform01(rng) - 1.0;
    po(i, 1) = 2.0 * uniform01(rng) - 1.0;
    tau[i] = po(i, 1) - po(i, 0);
  }
  const auto best = optimal_policy(tau);
  CHECK(policy_risk_error(best, tau, po) == 0.0);
  std::vector<Action> anti(n);
  for (int i = 0; i < n; ++i) anti[i] = tau[i] >= 0.0 ? Action::kTreat : Action::kControl;
  CHECK(policy_risk_error(anti, tau, po) > 0.0);
  const double v = policy_risk(anti, po) - policy_risk(best, po);
  CHECK(policy_risk_error(anti, tau, po) == doctest::Approx(v * v));
  CHECK(policy_risk(best, po) <= policy_risk(anti, po));

  // Row permutations leave the error unchanged.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  Eigen::MatrixXd po2(n, 2);
  std::vector<double> tau2(n);
  std::vector<Action> anti2(n);
  for (int i = 0; i < n; ++i) {
    po2.row(i) = po.row(perm[i]);
    tau2[i] = tau[perm[i]];
    anti2[i] = anti[perm[i]];
  }
  CHECK(policy_risk_error(anti2, tau2, po2) == doctest::Approx(policy_risk_error(anti, tau, po)).epsilon(1e-12));
}

TEST_CASE("deferral on positive and straddling intervals") {
  const std::vector<CateInterval> positive = {{0.1, 1.0}, {0.5, 2.0}, {1.0, 1.2}};
  const std::vector<double> tau = {0.5, 1.0, 1.1};
  const DeferralPoint p = evaluate_deferral(positive, tau);
  CHECK(p.deferral_fraction == 0.0);
  REQUIRE(p.error_rate);
  CHECK(*p.error_rate == 0.0);

  const std::vector<CateInterval> straddle = {{-0.1, 1.0}, {-0.5, 2.0}, {0.0, 1.2}};
  const DeferralPoint q = evaluate_deferral(straddle, tau);
  CHECK(q.deferral_fraction == 1.0);
  CHECK_FALSE(q.error_rate);

  const std::vector<CateInterval> mixed = {{0.2, 0.4}, {-0.3, -0.1}, {-1.0, 1.0}, {0.3, 0.9}};
  const std::vector<double> tau4 = {-0.2, 0.5, 0.0, 0.4};
  const DeferralPoint r = evaluate_deferral(mixed, tau4);
  CHECK(r.deferral_fraction == 0.25);
  REQUIRE(r.error_rate);
  CHECK(*r.error_rate == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("deferral curves per mode") {
  IntervalTable t;
  t.gammas = {1.0, 2.0, 4.0};
  t.num_points = 4;
  // Each point: gamma-widened mean intervals with some spread across omega.
  const double centers[4] = {1.0, -0.6, 0.3, 2.0};
  const double tau[4] = {0.8, 0.4, -0.2, 2.2};
  for (int i = 0; i < 4; ++i) {
    for (double g : t.gammas) {
      const double half = 0.2 * std::log(g) * 2.0;
      t.stats.push_back(stats(centers[i] - half, centers[i] + half, 0.04, 0.04));
    }
  }
  const std::vector<double> multipliers = {0.0, 1.0, 2.0};
  const auto sens = deferral_curve(t, tau, UncertaintyMode::kSensitivity, multipliers);
  REQUIRE(sens.size() == 3);
  for (std::size_t g = 1; g < sens.size(); ++g) {
    CHECK(sens[g].deferral_fraction >= sens[g - 1].deferral_fraction);
    CHECK(sens[g].multiplier == 0.0);
  }
  CHECK(sens[0].deferral_fraction == 0.0);
  const auto unc = deferral_curve(t, tau, UncertaintyMode::kUncertainty, multipliers);
  REQUIRE(unc.size() == 3);
  for (const auto& p : unc) CHECK(p.gamma == 1.0);
  const auto ign = deferral_curve(t, tau, UncertaintyMode::kIgnorance, multipliers);
  REQUIRE(ign.size() == 5);
  CHECK(ign[4].gamma == 4.0);
  CHECK(ign[4].multiplier == 2.0);
  CHECK(ign[4].sweep_value == doctest::Approx(2.0 + std::log(4.0)));
  for (std::size_t i = 1; i < ign.size(); ++i) CHECK(ign[i].deferral_fraction >= ign[i - 1].deferral_fraction);

  IntervalTable bad = t;
  bad.gammas = {2.0, 3.0, 4.0};
  CHECK_THROWS_AS(deferral_curve(bad, tau, UncertaintyMode::kSensitivity, multipliers), ContractError);
}

TEST_CASE("error at a target deferral fraction") {
  std::vector<DeferralPoint> curve(3);
  curve[0].deferral_fraction = 0.0;
  curve[0].error_rate = 0.3;
  curve[1].deferral_fraction = 0.4;
  curve[1].error_rate = 0.1;
  curve[2].deferral_fraction = 1.0;
  CHECK(*error_at_deferral(curve, 0.0) == 0.3);
  CHECK(*error_at_deferral(curve, 0.2) == doctest::Approx(0.2));
  CHECK(*error_at_deferral(curve, 0.4) == doctest::Approx(0.1));
  CHECK_FALSE(error_at_deferral(curve, 0.7));
}
