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

#include "cate/msm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cate/errors.hpp"

namespace cate {
namespace {

inline double lower_value(double mu_hat, double prefix, std::size_t k, std::size_t m,
                          double alpha_prime) {
  const double md = static_cast<double>(m);
  return mu_hat + (prefix / md) / (alpha_prime + static_cast<double>(k) / md);
}

inline double upper_value(double mu_hat, double suffix, std::size_t k, std::size_t m,
                          double alpha_prime) {
  const double md = static_cast<double>(m);
  return mu_hat + (suffix / md) / (alpha_prime + 1.0 - static_cast<double>(k) / md);
}

void check_sorted(std::span<const double> s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i - 1] <= s[i])) {
      throw ContractError("outcome samples must be sorted ascending (violation at index " +
                          std::to_string(i) + ")");
    }
  }
}

void check_k(std::size_t k, std::size_t m) {
  if (k < 1 || k > m) {
    throw ContractError("cut index " + std::to_string(k) + " outside [1, " + std::to_string(m) + "]");
  }
}

}  // namespace

void SensitivitySpec::validate() const {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw DomainError("gamma must be a finite value >= 1");
  if (num_param_samples < 1) throw DomainError("num_param_samples must be >= 1");
  if (num_outcome_samples < 2) throw DomainError("num_outcome_samples must be >= 2");
}

OddsBounds odds_bounds(double e, double gamma) {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
    throw DomainError("gamma must be >= 1, got " + std::to_string(gamma));
  }
  if (!(e > 0.0 && e < 1.0)) throw DomainError("propensity must lie in (0, 1)");
  OddsBounds o;
  o.alpha = 1.0 / (gamma * e) + 1.0 - 1.0 / gamma;
  o.beta = gamma / e + 1.0 - gamma;
  o.collapsed = gamma == 1.0;
  o.alpha_prime = o.collapsed ? 0.0 : o.alpha / (o.beta - o.alpha);
  return o;
}

double lambda_lower(std::size_t k, std::span<const double> sorted, double mu_hat,
                    double alpha_prime) {
  check_sorted(sorted);
  check_k(k, sorted.size());
  double prefix = 0.0;
  for (std::size_t i = 0; i < k; ++i) prefix += sorted[i] - mu_hat;
  return lower_value(mu_hat, prefix, k, sorted.size(), alpha_prime);
}

double lambda_upper(std::size_t k, std::span<const double> sorted, double mu_hat,
                    double alpha_prime) {
  check_sorted(sorted);
  check_k(k, sorted.size());
  double suffix = 0.0;
  for (std::size_t i = sorted.size(); i > k; --i) suffix += sorted[i - 1] - mu_hat;
  return upper_value(mu_hat, suffix, k, sorted.size(), alpha_prime);
}

ArmBounds arm_bounds(std::span<const double> sorted, double mu_hat, const OddsBounds& odds) {
  const std::size_t m = sorted.size();
  if (m < 2) throw ContractError("arm_bounds needs at least two samples");
  check_sorted(sorted);
  ArmBounds out;
  if (odds.collapsed) {
    out.lower = {mu_hat, 0};
    out.upper = {mu_hat, 0};
    return out;
  }
  const double ap = odds.alpha_prime;

  // Lower: prefix sums left to right.
  double prefix = sorted[0] - mu_hat;
  double current = lower_value(mu_hat, prefix, 1, m, ap);
  std::size_t k = 1;
  while (k < m) {
    const double next_prefix = prefix + (sorted[k] - mu_hat);
    const double next = lower_value(mu_hat, next_prefix, k + 1, m, ap);
    if (current <= next) break;
    prefix = next_prefix;
    current = next;
    ++k;
  }
  out.lower = {current, k};

  // Upper: suffix sums accumulated right to left, scanned left to right.
  thread_local std::vector<double> suffix;
  suffix.assign(m + 1, 0.0);
  double acc = 0.0;
  for (std::size_t i = m; i > 0; --i) {
    suffix[i] = acc;  // T_i = r_{i+1} + ... + r_m
    acc += sorted[i - 1] - mu_hat;
  }
  current = upper_value(mu_hat, suffix[1], 1, m, ap);
  k = 1;
  while (k < m) {
    const double next = upper_value(mu_hat, suffix[k + 1], k + 1, m, ap);
    if (current >= next) break;
    current = next;
    ++k;
  }
  out.upper = {current, k};
  return out;
}

CateInterval combine_arms(const ArmBounds& arm0, const ArmBounds& arm1) {
  return {arm1.lower.value - arm0.upper.value, arm1.upper.value - arm0.lower.value};
}

OmegaMasks sample_omega(const FittedModels& models, std::uint64_t seed, std::size_t omega_index) {
  OmegaMasks masks;
  Rng outcome_rng = make_rng(seed, Stream::kOutcomeMask, {omega_index});
  masks.outcome = models.outcome.sample_mask(outcome_rng);
  Rng propensity_rng = make_rng(seed, Stream::kPropensityMask, {omega_index});
  masks.propensity = models.propensity.sample_mask(propensity_rng);
  return masks;
}

std::vector<OmegaDraw> draw_omega(const FittedModels& models, const Eigen::MatrixXd& x,
                                  const OmegaMasks& masks, std::size_t m, std::uint64_t seed,
                                  std::size_t omega_index, std::size_t first_index) {
  if (m < 2) throw DomainError("need at least two outcome samples");
  const auto params0 = models.outcome.params(x, 0, &masks.outcome);
  const auto params1 = models.outcome.params(x, 1, &masks.outcome);
  const Eigen::VectorXd e1 = models.propensity.treated_probability(x, &masks.propensity);
  std::vector<OmegaDraw> draws(static_cast<std::size_t>(x.cols()));
  for (std::size_t i = 0; i < draws.size(); ++i) {
    OmegaDraw& d = draws[i];
    d.treated_propensity = e1[static_cast<Eigen::Index>(i)];
    const MixtureParams* p[2] = {&params0[i], &params1[i]};
    for (int t = 0; t < 2; ++t) {
      d.mu[t] = mixture_mean(*p[t]);
      Rng rng = make_rng(seed, Stream::kOutcomeSample,
                         {first_index + i, omega_index, static_cast<std::uint64_t>(t)});
      d.samples[t].resize(m);
      sample_mixture(*p[t], m, rng, d.samples[t].data());
      for (double v : d.samples[t]) {
        if (!std::isfinite(v)) {
          throw NumericError("non-finite outcome sample at point " + std::to_string(first_index + i),
                             first_index + i);
        }
      }
      std::sort(d.samples[t].begin(), d.samples[t].end());
    }
  }
  return draws;
}

OmegaBounds bounds_from_draw(const OmegaDraw& draw, double gamma) {
  OmegaBounds b;
  for (int t = 0; t < 2; ++t) {
    const OddsBounds odds = odds_bounds(arm_probability(draw.treated_propensity, t), gamma);
    b.arm[t] = arm_bounds(draw.samples[t], draw.mu[t], odds);
  }
  b.tau = combine_arms(b.arm[0], b.arm[1]);
  return b;
}

CateInterval cate_interval_per_omega(const FittedModels& models, const Eigen::VectorXd& x,
                                     const OmegaMasks& masks, const SensitivitySpec& spec,
                                     std::uint64_t seed, std::size_t x_index,
                                     std::size_t omega_index) {
  spec.validate();
  const auto draws = draw_omega(models, Eigen::MatrixXd(x), masks,
                                static_cast<std::size_t>(spec.num_outcome_samples), seed,
                                omega_index, x_index);
  return bounds_from_draw(draws.front(), spec.gamma).tau;
}

CateInterval IntervalStats::predictive(double multiplier) const {
  return {lower_mean - multiplier * std::sqrt(lower_var),
          upper_mean + multiplier * std::sqrt(upper_var)};
}

IntervalStats aggregate(std::span<const OmegaBounds> per_omega) {
  if (per_omega.empty()) throw DomainError("aggregate needs at least one omega");
  const double n = static_cast<double>(per_omega.size());
  // Means are taken relative to the first draw so identical draws aggregate
  // to exactly that draw.
  auto mean_of = [&](auto get) {
    const double ref = get(per_omega.front());
    double acc = 0.0;
    for (const auto& b : per_omega) acc += get(b) - ref;
    return ref + acc / n;
  };
  auto var_of = [&](auto get, double mean) {
    if (per_omega.size() < 2) return 0.0;
    double acc = 0.0;
    for (const auto& b : per_omega) acc += (get(b) - mean) * (get(b) - mean);
    return acc / (n - 1.0);
  };
  IntervalStats s;
  s.lower_mean = mean_of([](const OmegaBounds& b) { return b.tau.lower; });
  s.upper_mean = mean_of([](const OmegaBounds& b) { return b.tau.upper; });
  s.lower_var = var_of([](const OmegaBounds& b) { return b.tau.lower; }, s.lower_mean);
  s.upper_var = var_of([](const OmegaBounds& b) { return b.tau.upper; }, s.upper_mean);
  for (int t = 0; t < 2; ++t) {
    s.mu_lower_mean[t] = mean_of([t](const OmegaBounds& b) { return b.arm[t].lower.value; });
    s.mu_upper_mean[t] = mean_of([t](const OmegaBounds& b) { return b.arm[t].upper.value; });
  }
  return s;
}

CateInterval predictive_interval(const FittedModels& models, const Eigen::VectorXd& x,
                                 const SensitivitySpec& spec, std::uint64_t seed,
                                 std::size_t x_index, double multiplier) {
  spec.validate();
  std::vector<OmegaBounds> per_omega;
  const Eigen::MatrixXd xm = x;
  for (int w = 0; w < spec.num_param_samples; ++w) {
    const auto omega = static_cast<std::size_t>(w);
    const OmegaMasks masks = sample_omega(models, seed, omega);
    const auto draws = draw_omega(models, xm, masks,
                                  static_cast<std::size_t>(spec.num_outcome_samples), seed, omega,
                                  x_index);
    per_omega.push_back(bounds_from_draw(draws.front(), spec.gamma));
  }
  return aggregate(per_omega).predictive(multiplier);
}

}  // namespace cate
