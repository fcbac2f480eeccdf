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

#include "cate/simulated.hpp"

#include <cmath>

#include "cate/errors.hpp"
#include "cate/msm.hpp"
#include "cate/random.hpp"

namespace cate {

SimulatedScm::SimulatedScm(double gamma_star) : gamma_star_(gamma_star) {
  if (!(gamma_star >= 1.0)) throw DomainError("gamma_star must be >= 1");
}

double SimulatedScm::nominal_propensity(double x) { return sigmoid(0.75 * x + 0.5); }

double SimulatedScm::complete_propensity(double x, int u) const {
  const OddsBounds o = odds_bounds(nominal_propensity(x), gamma_star_);
  return u == 1 ? 1.0 / o.alpha : 1.0 / o.beta;
}

double SimulatedScm::marginal_propensity(double x) const {
  return 0.5 * (complete_propensity(x, 0) + complete_propensity(x, 1));
}

double SimulatedScm::conditional_mean(double x, int t, int u) {
  const double s = 2.0 * t - 1.0;
  return s * x + s - 2.0 * std::sin(2.0 * s * x) - 2.0 * (2.0 * u - 1.0) * (1.0 + 0.5 * x);
}

double SimulatedScm::arm_mean(double x, int t) {
  const double s = 2.0 * t - 1.0;
  return s * x + s - 2.0 * std::sin(2.0 * s * x);
}

double SimulatedScm::tau(double x) { return 2.0 * x + 2.0 - 4.0 * std::sin(2.0 * x); }

double SimulatedScm::posterior_u(double x, int t) const {
  const double p1 = complete_propensity(x, 1);
  const double p0 = complete_propensity(x, 0);
  const double l1 = t == 1 ? p1 : 1.0 - p1;
  const double l0 = t == 1 ? p0 : 1.0 - p0;
  return l1 / (l1 + l0);
}

MixtureParams SimulatedScm::outcome_density(double x, int t) const {
  MixtureParams p;
  const double w1 = posterior_u(x, t);
  p.weights = Eigen::Vector2d(1.0 - w1, w1);
  p.means = Eigen::Vector2d(conditional_mean(x, t, 0), conditional_mean(x, t, 1));
  p.stddevs = Eigen::Vector2d(1.0, 1.0);
  return p;
}

double SimulatedScm::observed_mean(double x, int t) const {
  return mixture_mean(outcome_density(x, t));
}

double SimulatedScm::confounded_bias(double x) const {
  return -2.0 * (2.0 + x) * (posterior_u(x, 1) - posterior_u(x, 0));
}

Dataset generate_simulated(Eigen::Index n, double gamma_star, std::uint64_t seed) {
  if (n < 1) throw DomainError("simulated dataset needs n >= 1");
  const SimulatedScm scm(gamma_star);
  Dataset d;
  d.covariates.resize(1, n);
  d.treatments.resize(n);
  d.outcomes.resize(n);
  d.hidden_confounder.resize(n);
  d.potential_outcomes.resize(n, 2);
  d.expected_outcomes.resize(n, 2);
  d.true_cate.resize(n);
  d.latent.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Rng rng = make_rng(seed, Stream::kDataRow, {static_cast<std::uint64_t>(i)});
    const int u = uniform01(rng) < 0.5 ? 1 : 0;
    const double x = -2.0 + 4.0 * uniform01(rng);
    const int t = uniform01(rng) < scm.complete_propensity(x, u) ? 1 : 0;
    std::normal_distribution<double> normal(0.0, 1.0);
    const double noise = normal(rng);
    d.covariates(0, i) = x;
    d.latent[i] = x;
    d.hidden_confounder[i] = u;
    d.treatments[i] = t;
    for (int a = 0; a < 2; ++a) {
      d.expected_outcomes(i, a) = SimulatedScm::conditional_mean(x, a, u);
      d.potential_outcomes(i, a) = d.expected_outcomes(i, a) + noise;
    }
    d.outcomes[i] = d.potential_outcomes(i, t);
    d.true_cate[i] = SimulatedScm::tau(x);
  }
  d.seed = seed;
  d.name = "simulated";
  d.gamma_star = gamma_star;
  return d;
}

DatasetSplits generate_simulated_splits(Eigen::Index n_train, Eigen::Index n_valid,
                                        Eigen::Index n_test, double gamma_star,
                                        std::uint64_t seed) {
  DatasetSplits s;
  s.train = generate_simulated(n_train, gamma_star, derive_seed(seed, Stream::kTrainData));
  s.train.split = Split::kTrain;
  if (n_valid > 0) {
    s.valid = generate_simulated(n_valid, gamma_star, derive_seed(seed, Stream::kValidData));
    s.valid.split = Split::kValid;
  }
  if (n_test > 0) {
    s.test = generate_simulated(n_test, gamma_star, derive_seed(seed, Stream::kTestData));
    s.test.split = Split::kTest;
  }
  for (Dataset* d : {&s.train, &s.valid, &s.test}) d->seed = seed;
  return s;
}

}  // namespace cate
