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

// One-dimensional Gaussian mixtures and the raw network head that
// parameterizes them.

#ifndef CATE_MIXTURE_HPP_
#define CATE_MIXTURE_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "cate/random.hpp"

namespace cate {

inline constexpr double kScaleFloor = 1e-3;

struct MixtureParams {
  Eigen::VectorXd weights;  // pi_j, sums to 1
  Eigen::VectorXd means;    // mu_j
  Eigen::VectorXd stddevs;  // sigma_j > 0

  Eigen::Index components() const { return weights.size(); }

  // Throws ShapeError / DomainError when the invariants do not hold.
  void validate() const;
};

MixtureParams single_gaussian(double mean, double stddev);

double mixture_mean(const MixtureParams& p);
double mixture_cdf(const MixtureParams& p, double y);
double mixture_density(const MixtureParams& p, double y);
double mixture_log_density(const MixtureParams& p, double y);

// Partial first moment: integral of y f(y) over (-inf, y].
double mixture_partial_mean(const MixtureParams& p, double y);

// Draws m values: component by weight, then a Gaussian draw.
std::vector<double> sample_mixture(const MixtureParams& p, std::size_t m, Rng& rng);
void sample_mixture(const MixtureParams& p, std::size_t m, Rng& rng, double* out);

// Affine change of variables y -> shift + scale * y.
MixtureParams rescale(const MixtureParams& p, double shift, double scale);

// Head layout for J components: rows [0, J) logits, [J, 2J) means,
// [2J, 3J) scale pre-activations mapped through softplus + kScaleFloor.
MixtureParams mixture_from_head(const double* head, Eigen::Index components);

double softplus(double v);
double sigmoid(double v);

// Negative log density of y under the mixture encoded by `head`, and its
// gradient with respect to the 3J head entries (written to grad when non-null).
double head_nll(const double* head, Eigen::Index components, double y, double* grad);

}  // namespace cate

#endif  // CATE_MIXTURE_HPP_
