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

// Conditional outcome density p(y | x, t): an optional feature extractor,
// then a trunk fed with [features; t] whose linear head parameterizes a
// J-component Gaussian mixture.
//
// Outcomes are standardized with the training split's mean and standard
// deviation; every public accessor reports values in original units.

#ifndef CATE_OUTCOME_MODEL_HPP_
#define CATE_OUTCOME_MODEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cate/dataset.hpp"
#include "cate/mixture.hpp"
#include "cate/nn.hpp"
#include "cate/training.hpp"

namespace cate {

struct OutcomeModelSpec {
  std::vector<int> encoder_hidden;             // empty: covariates feed the trunk
  std::vector<int> hidden = {200, 200, 200};   // trunk widths
  int components = 5;
  double dropout_rate = 0.1;
};

// One parameter realization of a two-stage model.
struct ModelMask {
  nn::DropoutMask encoder;
  nn::DropoutMask trunk;
};

class OutcomeModel {
 public:
  OutcomeModel() = default;
  OutcomeModel(Eigen::Index covariate_dim, const OutcomeModelSpec& spec, std::uint64_t seed);
  OutcomeModel(nn::DenseNetwork encoder, nn::DenseNetwork trunk, int components,
               double y_shift, double y_scale);

  Eigen::Index covariate_dim() const { return covariate_dim_; }
  int components() const { return components_; }
  const nn::DenseNetwork& encoder() const { return encoder_; }
  const nn::DenseNetwork& trunk() const { return trunk_; }
  nn::DenseNetwork& mutable_encoder() { return encoder_; }
  nn::DenseNetwork& mutable_trunk() { return trunk_; }

  double y_shift() const { return y_shift_; }
  double y_scale() const { return y_scale_; }
  void set_standardization(double shift, double scale);

  // Single-column masks: one draw of omega shared by every query point.
  ModelMask sample_mask(Rng& rng) const;

  // Raw head (3J x n) in standardized units. `t` holds one treatment per
  // column of `x`.
  Eigen::MatrixXd head(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                       const ModelMask* mask) const;

  // Mixture in original units for every column of x under treatment t.
  std::vector<MixtureParams> params(const Eigen::MatrixXd& x, int t, const ModelMask* mask) const;
  MixtureParams params(const Eigen::VectorXd& x, int t, const ModelMask* mask) const;

 private:
  Eigen::Index covariate_dim_ = 0;
  int components_ = 0;
  nn::DenseNetwork encoder_;
  nn::DenseNetwork trunk_;
  double y_shift_ = 0.0;
  double y_scale_ = 1.0;
};

// Mean negative log density of y (original units). Throws NumericError with
// the sample index when a density is not finite, ShapeError on an empty batch.
double nll_loss(const OutcomeModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                const Eigen::VectorXd& y, const ModelMask* mask);

double conditional_mean(const OutcomeModel& model, const Eigen::VectorXd& x, int t,
                        const ModelMask* mask);

std::vector<double> sample_y(const OutcomeModel& model, const Eigen::VectorXd& x, int t,
                             const ModelMask* mask, std::size_t m, Rng& rng);

double cdf(const OutcomeModel& model, const Eigen::VectorXd& x, int t, const ModelMask* mask,
           double y);

// Fits by minibatch Adam on the standardized NLL with per-example dropout.
// Sets the standardization from `train`. `valid` may be empty.
TrainingHistory fit_outcome_model(OutcomeModel& model, const Dataset& train,
                                  const Dataset& valid, const TrainingOptions& options);

std::string to_checkpoint(const OutcomeModel& model);
OutcomeModel outcome_model_from_checkpoint(const std::string& text);

}  // namespace cate

#endif  // CATE_OUTCOME_MODEL_HPP_
