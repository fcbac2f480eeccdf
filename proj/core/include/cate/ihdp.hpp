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

// Infant-health benchmark with a hidden confounder. Of the 25 covariates,
// x9 (mother married) plays the role of u and is withheld from the models.
// With x the remaining 24 covariates (continuous ones standardized),
//   Y0 = exp(b_x . (x + 0.5) + b_u (u + 0.5)) + N0,
//   Y1 = b_x . x + b_u u - s + N1,
// with independent unit-variance noises and s chosen so that the average
// noise-free effect over the treated rows is exactly 4.

#ifndef CATE_IHDP_HPP_
#define CATE_IHDP_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "cate/dataset.hpp"

namespace cate {

inline constexpr int kIhdpCovariates = 25;
inline constexpr int kIhdpContinuous = 6;    // x1..x6
inline constexpr int kIhdpHiddenColumn = 8;  // x9, zero-based
inline constexpr int kIhdpRows = 747;
inline constexpr int kIhdpTreated = 139;

// Raw covariates x1..x25 (25 x n) and treatment.
struct IhdpTable {
  Eigen::MatrixXd covariates;
  Eigen::VectorXd treatment;
  bool surrogate = false;
};

// CSV with a header naming `treatment` and x1..x25 (any order, extra columns
// ignored). Throws IngestionError listing every missing column.
IhdpTable read_ihdp_csv(const std::string& path);

// Synthetic stand-in with the published marginals: 747 rows, 139 treated,
// standard normal continuous covariates, binary frequencies from the
// covariate table (education and site as one-hot categories), and treatment
// assignment tilted by x9, x14, x17, x18 and the sites.
IhdpTable surrogate_ihdp_table(std::uint64_t seed);

struct IhdpScm {
  Eigen::VectorXd beta_x;  // 24 coefficients for the released covariates
  double beta_u = 0.0;
  double offset = 0.0;     // s
  double shift_w = 0.5;

  double mu0(const Eigen::VectorXd& x, double u) const;
  double mu1(const Eigen::VectorXd& x, double u) const;
};

struct IhdpData {
  Dataset all;  // every row; covariates exclude u
  DatasetSplits splits;
  IhdpScm scm;
};

// beta_u_override replaces the sampled b_u (0 removes the confounding).
IhdpData generate_ihdp_hidden(const IhdpTable& table, std::uint64_t seed,
                              std::optional<double> beta_u_override = std::nullopt);

}  // namespace cate

#endif  // CATE_IHDP_HPP_
