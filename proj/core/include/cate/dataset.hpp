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

#ifndef CATE_DATASET_HPP_
#define CATE_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cate {

enum class Split { kAll, kTrain, kValid, kTest };

std::string to_string(Split split);

// Observational data plus whatever ground truth the generator knows.
// Optional fields are empty (size 0) when absent.
struct Dataset {
  Eigen::MatrixXd covariates;  // d x n, one column per unit
  Eigen::VectorXd treatments;  // n, values in {0, 1}
  Eigen::VectorXd outcomes;    // n

  Eigen::VectorXd hidden_confounder;   // n
  Eigen::MatrixXd potential_outcomes;  // n x 2, columns Y0, Y1 (with noise)
  Eigen::MatrixXd expected_outcomes;   // n x 2, noise-free arm means given (x, u)
  Eigen::VectorXd true_cate;           // n, E[Y1 - Y0 | X = x]
  Eigen::VectorXd latent;              // n, scalar index the SCM is written in

  Split split = Split::kAll;
  std::uint64_t seed = 0;
  std::string name;
  double gamma_star = 1.0;

  Eigen::Index size() const { return treatments.size(); }
  Eigen::Index dim() const { return covariates.rows(); }

  bool has_potential_outcomes() const { return potential_outcomes.size() > 0; }
  bool has_true_cate() const { return true_cate.size() > 0; }
  bool has_hidden_confounder() const { return hidden_confounder.size() > 0; }

  // Throws ShapeError / DomainError when lengths disagree, treatments are not
  // binary, or stored potential outcomes contradict the observed outcome.
  void validate() const;

  // Rows `rows` in the given order, tagged with `tag`.
  Dataset subset(const std::vector<Eigen::Index>& rows, Split tag) const;
};

struct SplitFractions {
  double train = 1.0;
  double valid = 0.0;
  double test = 0.0;
};

struct DatasetSplits {
  Dataset train;
  Dataset valid;
  Dataset test;
};

// Seeded partition. Valid and test sizes are floor(fraction * n); the
// remainder goes to train. Each part keeps the original row order. Throws
// ConfigError when fractions do not sum to 1 or a part with positive
// fraction comes out empty.
DatasetSplits split(const Dataset& data, const SplitFractions& fractions,
                    std::uint64_t seed);

// Same partition rule with explicit sizes (train + valid + test == n).
DatasetSplits split_sizes(const Dataset& data, Eigen::Index n_train, Eigen::Index n_valid,
                          Eigen::Index n_test, std::uint64_t seed);

// Concatenates rows of several datasets (same dimension) in order.
Dataset concatenate(const std::vector<const Dataset*>& parts, Split tag);

// CSV export: header t,y,x0..x{d-1} and, when present, u,y0,y1,mu0,mu1,cate,latent.
void write_dataset_csv(const Dataset& data, const std::string& path);
// Also reads generator, seed and gamma_star from a sibling .json sidecar when
// one exists.
Dataset read_dataset_csv(const std::string& path);

// JSON sidecar with seed, gamma_star, generator name and version.
void write_dataset_sidecar(const Dataset& data, const std::string& path);

inline constexpr int kGeneratorVersion = 1;

}  // namespace cate

#endif  // CATE_DATASET_HPP_
