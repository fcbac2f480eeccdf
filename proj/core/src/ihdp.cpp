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

#include "cate/ihdp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "cate/errors.hpp"
#include "cate/format.hpp"
#include "cate/random.hpp"

namespace cate {
namespace {

// p(x = 1) of the single binary covariates x7, x8, x9, x13..x18.
struct BinaryFreq {
  int column;  // zero-based
  double p;
};
constexpr BinaryFreq kBinary[] = {{6, 0.51},  {7, 0.09},  {8, 0.52},  {12, 0.36}, {13, 0.48},
                                  {14, 0.14}, {15, 0.96}, {16, 0.59}, {17, 0.96}};
// x10..x12: left high school, completed high school, some college; the rest
// attended college.
constexpr double kEducation[] = {0.36, 0.27, 0.22};
// x19..x25: sites 1..7; the rest live at site 8.
constexpr double kSite[] = {0.14, 0.14, 0.16, 0.08, 0.07, 0.13, 0.16};
// Treatment tilt per site (sites with non-negligible association).
constexpr double kSiteTilt[] = {0.0, 0.4, 0.0, -0.4, 0.6, -0.3, 0.5};

int categorical(Rng& rng, const double* probs, int n) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    acc += probs[k];
    if (u < acc) return k;
  }
  return n;  // the implicit remaining category
}

// Released covariate column (24) for raw column j (25), or -1 for x9.
int released_index(int j) {
  if (j == kIhdpHiddenColumn) return -1;
  return j < kIhdpHiddenColumn ? j : j - 1;
}

}  // namespace

IhdpTable read_ihdp_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IngestionError(path + ": empty file", 1);
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < header.size(); ++k) col[header[k]] = k;
  std::vector<std::string> names = {"treatment"};
  for (int j = 1; j <= kIhdpCovariates; ++j) names.push_back("x" + std::to_string(j));
  std::string missing;
  for (const auto& n : names) {
    if (!col.count(n)) missing += (missing.empty() ? "" : ", ") + n;
  }
  if (!missing.empty()) throw IngestionError(path + ": missing columns: " + missing, 1);

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw IngestionError(path + ": line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(header.size()),
                           line_no);
    }
    std::vector<double> r;
    for (const auto& n : names) r.push_back(parse_double(fields[col[n]], line_no));
    if (r[0] != 0.0 && r[0] != 1.0) {
      throw IngestionError(path + ": line " + std::to_string(line_no) + ": treatment not binary",
                           line_no);
    }
    rows.push_back(std::move(r));
  }
  if (rows.size() < 10) throw IngestionError(path + ": too few rows", line_no);
  IhdpTable t;
  const auto n = static_cast<Eigen::Index>(rows.size());
  t.covariates.resize(kIhdpCovariates, n);
  t.treatment.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    t.treatment[i] = r[0];
    for (int j = 0; j < kIhdpCovariates; ++j) t.covariates(j, i) = r[static_cast<std::size_t>(j + 1)];
  }
  return t;
}

IhdpTable surrogate_ihdp_table(std::uint64_t seed) {
  IhdpTable t;
  t.surrogate = true;
  t.covariates = Eigen::MatrixXd::Zero(kIhdpCovariates, kIhdpRows);
  t.treatment = Eigen::VectorXd::Zero(kIhdpRows);
  std::vector<double> score(kIhdpRows);
  for (int i = 0; i < kIhdpRows; ++i) {
    Rng rng = make_rng(seed, Stream::kSurrogate, {static_cast<std::uint64_t>(i)});
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = 0; j < kIhdpContinuous; ++j) t.covariates(j, i) = normal(rng);
    for (const auto& b : kBinary) t.covariates(b.column, i) = uniform01(rng) < b.p ? 1.0 : 0.0;
    const int edu = categorical(rng, kEducation, 3);
    if (edu < 3) t.covariates(9 + edu, i) = 1.0;
    const int site = categorical(rng, kSite, 7);
    if (site < 7) t.covariates(18 + site, i) = 1.0;
    score[static_cast<std::size_t>(i)] =
        0.9 * t.covariates(8, i) - 0.6 * t.covariates(13, i) + 0.6 * t.covariates(16, i) +
        0.5 * t.covariates(17, i) + (site < 7 ? kSiteTilt[site] : 0.0) + 0.3 * t.covariates(0, i);
  }
  // Weighted sampling without replacement: keep the largest keys
  // log(v) / w with w = exp(score).
  Rng rng = make_rng(seed, Stream::kSurrogate, {static_cast<std::uint64_t>(kIhdpRows)});
  std::vector<double> key(kIhdpRows);
  for (int i = 0; i < kIhdpRows; ++i) {
    const double v = std::max(uniform01(rng), 1e-300);
    key[static_cast<std::size_t>(i)] = std::log(v) / std::exp(score[static_cast<std::size_t>(i)]);
  }
  std::vector<int> order(kIhdpRows);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return key[static_cast<std::size_t>(a)] > key[static_cast<std::size_t>(b)]; });
  for (int k = 0; k < kIhdpTreated; ++k) t.treatment[order[static_cast<std::size_t>(k)]] = 1.0;
  return t;
}

double IhdpScm::mu0(const Eigen::VectorXd& x, double u) const {
  return std::exp(beta_x.dot((x.array() + shift_w).matrix()) + beta_u * (u + 0.5));
}

double IhdpScm::mu1(const Eigen::VectorXd& x, double u) const {
  return beta_x.dot(x) + beta_u * u - offset;
}

IhdpData generate_ihdp_hidden(const IhdpTable& table, std::uint64_t seed,
                              std::optional<double> beta_u_override) {
  const Eigen::Index n = table.covariates.cols();
  if (table.covariates.rows() != kIhdpCovariates || table.treatment.size() != n) {
    throw ShapeError("IHDP table must hold 25 covariates per row and one treatment per row");
  }
  const double treated = table.treatment.sum();
  if (treated < 1.0 || treated >= static_cast<double>(n)) {
    throw DomainError("IHDP table needs treated and control rows");
  }

  // Standardize continuous covariates over all rows.
  Eigen::MatrixXd raw = table.covariates;
  for (int j = 0; j < kIhdpContinuous; ++j) {
    const double mean = raw.row(j).mean();
    const double var = (raw.row(j).array() - mean).square().sum() / static_cast<double>(n - 1);
    const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
    raw.row(j) = (raw.row(j).array() - mean) / sd;
  }
  Eigen::MatrixXd released(kIhdpCovariates - 1, n);
  for (int j = 0; j < kIhdpCovariates; ++j) {
    const int r = released_index(j);
    if (r >= 0) released.row(r) = raw.row(j);
  }
  const Eigen::VectorXd u = raw.row(kIhdpHiddenColumn).transpose();

  IhdpData out;
  Rng coef = make_rng(seed, Stream::kCoefficients);
  out.scm.beta_x.resize(kIhdpCovariates - 1);
  static constexpr double kBetaValues[] = {0.0, 0.1, 0.2, 0.3, 0.4};
  static constexpr double kBetaProbs[] = {0.6, 0.1, 0.1, 0.1};
  for (Eigen::Index j = 0; j < out.scm.beta_x.size(); ++j) {
    out.scm.beta_x[j] = kBetaValues[categorical(coef, kBetaProbs, 4)];
  }
  const double uniform_u = uniform01(coef);
  out.scm.beta_u = beta_u_override ? *beta_u_override
                                   : 0.1 * (1 + std::min(4, static_cast<int>(uniform_u * 5.0)));

  // Offset so the noise-free effect averaged over treated rows is 4.
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (table.treatment[i] == 1.0) {
      const Eigen::VectorXd x = released.col(i);
      acc += out.scm.beta_x.dot(x) + out.scm.beta_u * u[i] - out.scm.mu0(x, u[i]);
    }
  }
  out.scm.offset = acc / treated - 4.0;

  Dataset& d = out.all;
  d.covariates = released;
  d.treatments = table.treatment;
  d.outcomes.resize(n);
  d.hidden_confounder = u;
  d.potential_outcomes.resize(n, 2);
  d.expected_outcomes.resize(n, 2);
  d.true_cate.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd x = released.col(i);
    Rng rng = make_rng(seed, Stream::kDataRow, {static_cast<std::uint64_t>(i)});
    std::normal_distribution<double> normal(0.0, 1.0);
    const double n0 = normal(rng);
    const double n1 = normal(rng);
    d.expected_outcomes(i, 0) = out.scm.mu0(x, u[i]);
    d.expected_outcomes(i, 1) = out.scm.mu1(x, u[i]);
    d.potential_outcomes(i, 0) = d.expected_outcomes(i, 0) + n0;
    d.potential_outcomes(i, 1) = d.expected_outcomes(i, 1) + n1;
    d.true_cate[i] = d.expected_outcomes(i, 1) - d.expected_outcomes(i, 0);
    d.outcomes[i] = d.potential_outcomes(i, static_cast<Eigen::Index>(table.treatment[i]));
  }
  d.seed = seed;
  d.name = table.surrogate ? "ihdp-surrogate" : "ihdp";

  Eigen::Index n_valid = 202;
  Eigen::Index n_test = 75;
  if (n != kIhdpRows) {
    n_valid = static_cast<Eigen::Index>(std::floor(static_cast<double>(n) * 202.0 / kIhdpRows));
    n_test = static_cast<Eigen::Index>(std::floor(static_cast<double>(n) * 75.0 / kIhdpRows));
  }
  out.splits = split_sizes(d, n - n_valid - n_test, n_valid, n_test, seed);
  return out;
}

}  // namespace cate
