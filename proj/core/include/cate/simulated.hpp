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

// The one-dimensional confounded benchmark:
//   u ~ Bern(0.5), x ~ U[-2, 2],
//   t ~ Bern(e(x, u)),  e(x, u) = u / alpha(x; G) + (1 - u) / beta(x; G),
//   y = (2t-1) x + (2t-1) - 2 sin(2 (2t-1) x) - 2 (2u-1)(1 + 0.5 x) + N(0, 1),
// where alpha and beta are the odds bounds at the nominal propensity
// sigmoid(0.75 x + 0.5) and level G. Both potential outcomes share the noise
// draw, so Y1 - Y0 = tau(x) = 2x + 2 - 4 sin(2x) for every unit.

#ifndef CATE_SIMULATED_HPP_
#define CATE_SIMULATED_HPP_

#include <cstdint>

#include "cate/dataset.hpp"
#include "cate/mixture.hpp"

namespace cate {

class SimulatedScm {
 public:
  explicit SimulatedScm(double gamma_star = 1.0);

  double gamma_star() const { return gamma_star_; }

  // sigmoid(0.75 x + 0.5), the propensity the construction is built around.
  static double nominal_propensity(double x);
  // P(T = 1 | x, u).
  double complete_propensity(double x, int u) const;
  // P(T = 1 | x) = E_u[e(x, u)]; equals nominal_propensity only when G = 1.
  double marginal_propensity(double x) const;

  // E[Y | x, t, u] without noise.
  static double conditional_mean(double x, int t, int u);
  // E[Y^t | x] (u marginalized with P(u = 1) = 0.5).
  static double arm_mean(double x, int t);
  static double tau(double x);

  // P(u = 1 | T = t, x).
  double posterior_u(double x, int t) const;
  // Observed-data density f(y | x, t): two unit-variance components weighted
  // by the posterior of u.
  MixtureParams outcome_density(double x, int t) const;
  // E[Y | T = t, x] under the observational distribution.
  double observed_mean(double x, int t) const;
  // (E[Y | T=1, x] - E[Y | T=0, x]) - tau(x) = -2 (2 + x)(P(u=1|1,x) - P(u=1|0,x)).
  double confounded_bias(double x) const;

 private:
  double gamma_star_;
};

// n rows from seed; row i uses its own counter-derived stream, so a prefix of
// a larger dataset with the same seed is identical.
Dataset generate_simulated(Eigen::Index n, double gamma_star, std::uint64_t seed);

// Train/valid/test realizations with independent derived seeds.
DatasetSplits generate_simulated_splits(Eigen::Index n_train, Eigen::Index n_valid,
                                        Eigen::Index n_test, double gamma_star,
                                        std::uint64_t seed);

}  // namespace cate

#endif  // CATE_SIMULATED_HPP_
