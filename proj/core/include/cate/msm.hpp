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

// CATE bounds under the marginal sensitivity model.
//
// For an arm t with nominal propensity e and confounding level gamma,
//   alpha = 1/(gamma e) + 1 - 1/gamma,  beta = gamma/e + 1 - gamma,
//   alpha' = alpha / (beta - alpha).
// Given m outcome samples sorted ascending, residuals r_i = y_i - mu_hat,
// S_k = r_1 + ... + r_k and T_k = r_{k+1} + ... + r_m:
//   lower(k) = mu_hat + (S_k / m) / (alpha' + k / m)
//   upper(k) = mu_hat + (T_k / m) / (alpha' + 1 - k / m)
// The arm bounds are min_k lower(k) and max_k upper(k), k = 1..m. Both curves
// are unimodal in k, so a left-to-right scan stops at the first k whose
// successor does not improve.
//
// Prefix sums accumulate left to right and suffix sums right to left, in the
// standalone lambda functions and in the scan alike, so the two agree bit
// for bit.

#ifndef CATE_MSM_HPP_
#define CATE_MSM_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cate/outcome_model.hpp"
#include "cate/propensity.hpp"

namespace cate {

struct SensitivitySpec {
  double gamma = 1.0;
  int num_param_samples = 50;     // omega draws
  int num_outcome_samples = 100;  // y draws per (x, omega, arm)

  // Throws DomainError for gamma < 1 or non-positive budgets / m < 2.
  void validate() const;
};

struct OddsBounds {
  double alpha = 1.0;
  double beta = 1.0;
  double alpha_prime = 0.0;  // meaningless when collapsed
  bool collapsed = true;     // gamma == 1: bounds reduce to mu_hat
};

// Throws DomainError for gamma < 1 or e outside (0, 1).
OddsBounds odds_bounds(double e, double gamma);

// k is 1-based. Throws ContractError when samples are not ascending or k is
// outside [1, m].
double lambda_lower(std::size_t k, std::span<const double> sorted_samples, double mu_hat,
                    double alpha_prime);
double lambda_upper(std::size_t k, std::span<const double> sorted_samples, double mu_hat,
                    double alpha_prime);

struct ArmBound {
  double value = 0.0;
  std::size_t k = 0;  // 1-based cut; 0 for the collapsed case
};

struct ArmBounds {
  ArmBound lower;
  ArmBound upper;
};

// Line search over cuts. Throws ContractError for unsorted input or m < 2.
ArmBounds arm_bounds(std::span<const double> sorted_samples, double mu_hat,
                     const OddsBounds& odds);

struct CateInterval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  bool contains(double v) const { return lower <= v && v <= upper; }
  bool contains(const CateInterval& o) const { return lower <= o.lower && o.upper <= upper; }
};

// [lower(1) - upper(0), upper(1) - lower(0)].
CateInterval combine_arms(const ArmBounds& arm0, const ArmBounds& arm1);

struct FittedModels {
  OutcomeModel outcome;
  PropensityModel propensity;
};

// Masks realizing parameter draw omega_index.
struct OmegaMasks {
  ModelMask outcome;
  nn::DropoutMask propensity;
};

OmegaMasks sample_omega(const FittedModels& models, std::uint64_t seed, std::size_t omega_index);

// Everything needed to evaluate the bounds for one (x, omega) at any gamma:
// the arm means, the treated propensity and the sorted outcome samples.
struct OmegaDraw {
  double mu[2] = {0.0, 0.0};
  double treated_propensity = 0.5;
  std::vector<double> samples[2];
};

// Draws for every column of x. Outcome samples for column i use the seed
// (seed, first_index + i, omega_index, arm), independent of batching.
std::vector<OmegaDraw> draw_omega(const FittedModels& models, const Eigen::MatrixXd& x,
                                  const OmegaMasks& masks, std::size_t m, std::uint64_t seed,
                                  std::size_t omega_index, std::size_t first_index = 0);

struct OmegaBounds {
  ArmBounds arm[2];
  CateInterval tau;
};

OmegaBounds bounds_from_draw(const OmegaDraw& draw, double gamma);

// One omega, one x: samples m outcomes per arm under `masks`.
CateInterval cate_interval_per_omega(const FittedModels& models, const Eigen::VectorXd& x,
                                     const OmegaMasks& masks, const SensitivitySpec& spec,
                                     std::uint64_t seed, std::size_t x_index,
                                     std::size_t omega_index);

// Mean and unbiased variance of the endpoints across omega (variance 0 for a
// single omega), plus mean arm bounds.
struct IntervalStats {
  double lower_mean = 0.0;
  double upper_mean = 0.0;
  double lower_var = 0.0;
  double upper_var = 0.0;
  double mu_lower_mean[2] = {0.0, 0.0};
  double mu_upper_mean[2] = {0.0, 0.0};

  // [lower_mean - c sd_lower, upper_mean + c sd_upper].
  CateInterval predictive(double multiplier = 2.0) const;
  CateInterval mean_interval() const { return {lower_mean, upper_mean}; }
};

IntervalStats aggregate(std::span<const OmegaBounds> per_omega);

// Predictive interval at spec.gamma over spec.num_param_samples draws.
CateInterval predictive_interval(const FittedModels& models, const Eigen::VectorXd& x,
                                 const SensitivitySpec& spec, std::uint64_t seed,
                                 std::size_t x_index = 0, double multiplier = 2.0);

}  // namespace cate

#endif  // CATE_MSM_HPP_
