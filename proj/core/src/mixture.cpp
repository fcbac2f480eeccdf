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

#include "cate/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cate/errors.hpp"

namespace cate {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }

}  // namespace

void MixtureParams::validate() const {
  if (weights.size() == 0) throw ShapeError("mixture needs at least one component");
  if (means.size() != weights.size() || stddevs.size() != weights.size()) {
    throw ShapeError("mixture weights, means and stddevs differ in length");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-6 || (weights.array() < 0.0).any()) {
    throw DomainError("mixture weights must be non-negative and sum to 1");
  }
  if (!(stddevs.array() > 0.0).all()) throw DomainError("mixture stddevs must be positive");
}

MixtureParams single_gaussian(double mean, double stddev) {
  MixtureParams p;
  p.weights = Eigen::VectorXd::Ones(1);
  p.means = Eigen::VectorXd::Constant(1, mean);
  p.stddevs = Eigen::VectorXd::Constant(1, stddev);
  return p;
}

double mixture_mean(const MixtureParams& p) { return p.weights.dot(p.means); }

double mixture_cdf(const MixtureParams& p, double y) {
  double c = 0.0;
  for (Eigen::Index j = 0; j < p.components(); ++j) {
    c += p.weights[j] * normal_cdf((y - p.means[j]) / p.stddevs[j]);
  }
  return std::clamp(c, 0.0, 1.0);
}

double mixture_density(const MixtureParams& p, double y) {
  double d = 0.0;
  for (Eigen::Index j = 0; j < p.components(); ++j) {
    d += p.weights[j] * normal_pdf((y - p.means[j]) / p.stddevs[j]) / p.stddevs[j];
  }
  return d;
}

double mixture_log_density(const MixtureParams& p, double y) {
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd terms(p.components());
  for (Eigen::Index j = 0; j < p.components(); ++j) {
    const double z = (y - p.means[j]) / p.stddevs[j];
    terms[j] = std::log(p.weights[j]) - 0.5 * z * z - kLogSqrt2Pi - std::log(p.stddevs[j]);
    best = std::max(best, terms[j]);
  }
  if (!std::isfinite(best)) return best;
  return best + std::log((terms.array() - best).exp().sum());
}

double mixture_partial_mean(const MixtureParams& p, double y) {
  // For N(mu, s^2): int_{-inf}^{y} v f(v) dv = mu Phi(z) - s phi(z).
  double s = 0.0;
  for (Eigen::Index j = 0; j < p.components(); ++j) {
    const double z = (y - p.means[j]) / p.stddevs[j];
    s += p.weights[j] * (p.means[j] * normal_cdf(z) - p.stddevs[j] * normal_pdf(z));
  }
  return s;
}

void sample_mixture(const MixtureParams& p, std::size_t m, Rng& rng, double* out) {
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index last = p.components() - 1;
  for (std::size_t i = 0; i < m; ++i) {
    const double u = pick(rng);
    Eigen::Index j = 0;
    double acc = p.weights[0];
    while (j < last && u >= acc) acc += p.weights[++j];
    out[i] = p.means[j] + p.stddevs[j] * normal(rng);
  }
}

std::vector<double> sample_mixture(const MixtureParams& p, std::size_t m, Rng& rng) {
  std::vector<double> out(m);
  sample_mixture(p, m, rng, out.data());
  return out;
}

MixtureParams rescale(const MixtureParams& p, double shift, double scale) {
  MixtureParams q = p;
  q.means = (p.means.array() * scale + shift).matrix();
  q.stddevs = p.stddevs * std::abs(scale);
  return q;
}

double softplus(double v) { return v > 30.0 ? v : std::log1p(std::exp(v)); }

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

MixtureParams mixture_from_head(const double* head, Eigen::Index components) {
  const Eigen::Index J = components;
  MixtureParams p;
  p.weights.resize(J);
  p.means.resize(J);
  p.stddevs.resize(J);
  double top = head[0];
  for (Eigen::Index j = 1; j < J; ++j) top = std::max(top, head[j]);
  double total = 0.0;
  for (Eigen::Index j = 0; j < J; ++j) {
    p.weights[j] = std::exp(head[j] - top);
    total += p.weights[j];
  }
  p.weights /= total;
  for (Eigen::Index j = 0; j < J; ++j) {
    p.means[j] = head[J + j];
    p.stddevs[j] = softplus(head[2 * J + j]) + kScaleFloor;
  }
  return p;
}

double head_nll(const double* head, Eigen::Index components, double y, double* grad) {
  const Eigen::Index J = components;
  double top = head[0];
  for (Eigen::Index j = 1; j < J; ++j) top = std::max(top, head[j]);
  double zsum = 0.0;
  for (Eigen::Index j = 0; j < J; ++j) zsum += std::exp(head[j] - top);
  const double log_norm = top + std::log(zsum);

  // Per-component joint log terms l_j = log pi_j + log N(y | mu_j, s_j).
  double l[64];
  std::vector<double> big;
  double* lj = l;
  if (J > 64) {
    big.resize(static_cast<std::size_t>(J));
    lj = big.data();
  }
  double lmax = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < J; ++j) {
    const double s = softplus(head[2 * J + j]) + kScaleFloor;
    const double z = (y - head[J + j]) / s;
    lj[j] = head[j] - log_norm - 0.5 * z * z - kLogSqrt2Pi - std::log(s);
    lmax = std::max(lmax, lj[j]);
  }
  double acc = 0.0;
  for (Eigen::Index j = 0; j < J; ++j) acc += std::exp(lj[j] - lmax);
  const double log_density = lmax + std::log(acc);

  if (grad != nullptr) {
    for (Eigen::Index j = 0; j < J; ++j) {
      const double gamma = std::exp(lj[j] - log_density);  // responsibility
      const double pi = std::exp(head[j] - log_norm);
      const double s = softplus(head[2 * J + j]) + kScaleFloor;
      const double r = y - head[J + j];
      grad[j] = pi - gamma;
      grad[J + j] = -gamma * r / (s * s);
      grad[2 * J + j] = gamma * (1.0 / s - r * r / (s * s * s)) * sigmoid(head[2 * J + j]);
    }
  }
  return -log_density;
}

}  // namespace cate
