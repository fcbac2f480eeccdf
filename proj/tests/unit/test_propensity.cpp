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

#include <doctest.h>

#include "cate/errors.hpp"
#include "cate/mixture.hpp"
#include "cate/propensity.hpp"
#include "cate/simulated.hpp"

using namespace cate;

namespace {

Dataset treatment_only(const Eigen::MatrixXd& x, const Eigen::VectorXd& t) {
  Dataset d;
  d.covariates = x;
  d.treatments = t;
  d.outcomes = Eigen::VectorXd::Zero(t.size());
  return d;
}

Dataset independent_treatment(Eigen::Index n, double p, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(2, n);
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(0, i) = 4.0 * uniform01(rng) - 2.0;
    x(1, i) = 4.0 * uniform01(rng) - 2.0;
    t[i] = uniform01(rng) < p ? 1.0 : 0.0;
  }
  return treatment_only(x, t);
}

TrainingOptions quick(std::uint64_t seed) {
  TrainingOptions o;
  o.batch_size = 64;
  o.max_epochs = 100;
  o.patience = 10;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("clipping and arm probabilities") {
  CHECK(clip_probability(0.001, 0.01) == 0.01);
  CHECK(clip_probability(0.9995, 0.01) == 0.99);
  CHECK(clip_probability(0.3, 0.01) == 0.3);
  CHECK(arm_probability(0.3, 1) == 0.3);
  CHECK(arm_probability(0.3, 0) == 0.7);
  CHECK(arm_probability(0.3, 0) + arm_probability(0.3, 1) == 1.0);
}

TEST_CASE("saturated network output is clipped") {
  nn::DenseLayer l;
  l.weight = Eigen::MatrixXd::Constant(1, 1, 100.0);
  l.bias = Eigen::VectorXd::Zero(1);
  const PropensityModel model(nn::DenseNetwork({l}, 0.0, 0), 0.01);
  Eigen::MatrixXd x(1, 3);
  x << -5.0, 0.0, 5.0;
  const Eigen::VectorXd p = model.treated_probability(x, nullptr);
  CHECK(p[0] == 0.01);
  CHECK(p[1] == 0.5);
  CHECK(p[2] == 0.99);
  CHECK(propensity_for_arm(model, Eigen::VectorXd::Constant(1, -5.0), 0, nullptr) == 0.99);
}

TEST_CASE("independent treatment is learned as a constant") {
  const Dataset train = independent_treatment(2000, 0.7, 1);
  const Dataset valid = independent_treatment(500, 0.7, 2);
  const Dataset test = independent_treatment(500, 0.7, 3);
  const PropensityModel model = fit_propensity(train, valid, {{16, 16}, 0.1, 0.01}, quick(4));
  const Eigen::VectorXd p = model.treated_probability(test.covariates, nullptr);
  CHECK(p.minCoeff() >= 0.65);
  CHECK(p.maxCoeff() <= 0.75);
}

TEST_CASE("separable treatment saturates at the clip bounds") {
  const Eigen::Index n = 400;
  Eigen::MatrixXd x(1, n);
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(0, i) = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    t[i] = x(0, i) > 0.0 ? 1.0 : 0.0;
  }
  const Dataset d = treatment_only(x, t);
  TrainingOptions o = quick(5);
  o.max_epochs = 300;
  o.patience = 300;
  o.learning_rate = 1e-2;
  const PropensityModel model = fit_propensity(d, Dataset(), {{16}, 0.0, 0.01}, o);
  Eigen::MatrixXd probe(1, 2);
  probe << -1.8, 1.8;
  const Eigen::VectorXd p = model.treated_probability(probe, nullptr);
  CHECK(p[0] == 0.01);
  CHECK(p[1] == 0.99);
}

TEST_CASE("unconfounded benchmark propensity is recovered") {
  const DatasetSplits s = generate_simulated_splits(4000, 1000, 10, 1.0, 11);
  const PropensityModel model = fit_propensity(s.train, s.valid, {{32, 32}, 0.1, 0.01}, quick(12));
  double mae = 0.0;
  const int grid = 201;
  for (int i = 0; i < grid; ++i) {
    const double x = -2.0 + 4.0 * i / (grid - 1);
    const double p = model.treated_probability(Eigen::MatrixXd::Constant(1, 1, x), nullptr)[0];
    mae += std::abs(p - sigmoid(0.75 * x + 0.5));
  }
  CHECK(mae / grid < 0.05);
}

TEST_CASE("single treatment value cannot be fit") {
  Dataset d = independent_treatment(50, 0.5, 1);
  d.treatments.setOnes();
  CHECK_THROWS_AS(fit_propensity(d, Dataset(), {{4}, 0.0, 0.01}, quick(1)), TrainingError);
}

TEST_CASE("checkpoint round trip") {
  const PropensityModel model(3, {{5, 4}, 0.2, 0.02}, 7);
  const PropensityModel back = propensity_model_from_checkpoint(to_checkpoint(model));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 6);
  CHECK(back.treated_probability(x, nullptr) == model.treated_probability(x, nullptr));
  CHECK(back.clip() == 0.02);
}
