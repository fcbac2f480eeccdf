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

// Nominal propensity e(x) = P(T = 1 | X = x): a dense network with a sigmoid
// output trained by Bernoulli likelihood, clipped to [eps, 1 - eps].

#ifndef CATE_PROPENSITY_HPP_
#define CATE_PROPENSITY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cate/dataset.hpp"
#include "cate/nn.hpp"
#include "cate/training.hpp"

namespace cate {

inline constexpr double kPropensityClip = 0.01;

struct PropensitySpec {
  std::vector<int> hidden = {200, 200, 200};
  double dropout_rate = 0.1;
  double clip = kPropensityClip;
};

class PropensityModel {
 public:
  PropensityModel() = default;
  PropensityModel(Eigen::Index covariate_dim, const PropensitySpec& spec, std::uint64_t seed);
  PropensityModel(nn::DenseNetwork net, double clip);

  const nn::DenseNetwork& network() const { return net_; }
  nn::DenseNetwork& mutable_network() { return net_; }
  double clip() const { return clip_; }
  Eigen::Index covariate_dim() const { return net_.input_dim(); }

  nn::DropoutMask sample_mask(Rng& rng) const { return nn::sample_mask(net_, rng, 1); }

  // Clipped P(T = 1 | x) for every column of x.
  Eigen::VectorXd treated_probability(const Eigen::MatrixXd& x, const nn::DropoutMask* mask) const;

 private:
  nn::DenseNetwork net_;
  double clip_ = kPropensityClip;
};

// Clip to [eps, 1 - eps].
double clip_probability(double p, double eps);

// Arm probability: p for t = 1 and 1 - p for t = 0, so both arms sum to 1.
double propensity_for_arm(const PropensityModel& model, const Eigen::VectorXd& x, int t,
                          const nn::DropoutMask* mask);
double arm_probability(double treated_probability, int t);

// Throws TrainingError when the training split holds a single treatment value.
PropensityModel fit_propensity(const Dataset& train, const Dataset& valid,
                               const PropensitySpec& spec, const TrainingOptions& options,
                               TrainingHistory* history = nullptr);

std::string to_checkpoint(const PropensityModel& model);
PropensityModel propensity_model_from_checkpoint(const std::string& text);

}  // namespace cate

#endif  // CATE_PROPENSITY_HPP_
