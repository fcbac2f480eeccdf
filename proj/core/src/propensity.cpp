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

#include "cate/propensity.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cate/errors.hpp"
#include "cate/mixture.hpp"
#include "json_io.hpp"

namespace cate {
namespace {

constexpr Eigen::Index kEvalChunk = 2048;

// Bernoulli NLL from a logit: softplus(z) - t z.
double bce_logit(double z, double t) { return softplus(z) - t * z; }

}  // namespace

double clip_probability(double p, double eps) { return std::clamp(p, eps, 1.0 - eps); }

double arm_probability(double treated_probability, int t) {
  if (t == 1) return treated_probability;
  if (t == 0) return 1.0 - treated_probability;
  throw DomainError("treatment must be 0 or 1");
}

PropensityModel::PropensityModel(Eigen::Index covariate_dim, const PropensitySpec& spec,
                                 std::uint64_t seed)
    : net_(nn::make_mlp({covariate_dim, spec.hidden, 1, spec.dropout_rate},
                        derive_seed(seed, Stream::kModel, {3}))),
      clip_(spec.clip) {
  if (!(spec.clip > 0.0 && spec.clip < 0.5)) throw DomainError("propensity clip must lie in (0, 0.5)");
}

PropensityModel::PropensityModel(nn::DenseNetwork net, double clip)
    : net_(std::move(net)), clip_(clip) {
  if (net_.output_dim() != 1) throw ShapeError("propensity network must have one output");
  if (!(clip > 0.0 && clip < 0.5)) throw DomainError("propensity clip must lie in (0, 0.5)");
}

Eigen::VectorXd PropensityModel::treated_probability(const Eigen::MatrixXd& x,
                                                     const nn::DropoutMask* mask) const {
  Eigen::VectorXd out(x.cols());
  for (Eigen::Index start = 0; start < x.cols(); start += kEvalChunk) {
    const Eigen::Index len = std::min(kEvalChunk, x.cols() - start);
    const Eigen::MatrixXd z = nn::forward(net_, Eigen::MatrixXd(x.middleCols(start, len)), mask);
    for (Eigen::Index i = 0; i < len; ++i) out[start + i] = clip_probability(sigmoid(z(0, i)), clip_);
  }
  return out;
}

double propensity_for_arm(const PropensityModel& model, const Eigen::VectorXd& x, int t,
                          const nn::DropoutMask* mask) {
  return arm_probability(model.treated_probability(Eigen::MatrixXd(x), mask)[0], t);
}

PropensityModel fit_propensity(const Dataset& train, const Dataset& valid,
                               const PropensitySpec& spec, const TrainingOptions& options,
                               TrainingHistory* history) {
  train.validate();
  const double treated = train.treatments.sum();
  if (treated == 0.0 || treated == static_cast<double>(train.size())) {
    throw TrainingError("propensity model: training data contains a single treatment value");
  }
  PropensityModel model(train.dim(), spec, options.seed);
  nn::DenseNetwork& net = model.mutable_network();
  nn::AdamOptions adam;
  adam.learning_rate = options.learning_rate;
  nn::OptimizerState state(net, adam);
  nn::ForwardPass tape;

  TrainingHooks hooks;
  hooks.num_train = static_cast<std::size_t>(train.size());
  hooks.train_batch = [&](const std::vector<std::size_t>& rows, Rng& mask_rng) {
    const auto B = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd xb(train.dim(), B);
    Eigen::VectorXd tb(B);
    for (Eigen::Index i = 0; i < B; ++i) {
      const auto r = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
      xb.col(i) = train.covariates.col(r);
      tb[i] = train.treatments[r];
    }
    const nn::DropoutMask mask = nn::sample_mask(net, mask_rng, B);
    const Eigen::MatrixXd z = nn::forward(net, xb, &mask, &tape);
    Eigen::MatrixXd grad(1, B);
    double total = 0.0;
    for (Eigen::Index i = 0; i < B; ++i) {
      total += bce_logit(z(0, i), tb[i]);
      grad(0, i) = (sigmoid(z(0, i)) - tb[i]) / static_cast<double>(B);
    }
    nn::optimizer_step(state, net, nn::backward(net, tape, grad));
    return total;
  };
  if (valid.size() > 0) {
    hooks.validation_loss = [&]() {
      const Eigen::MatrixXd z = nn::forward(net, valid.covariates, nullptr);
      double total = 0.0;
      for (Eigen::Index i = 0; i < z.cols(); ++i) total += bce_logit(z(0, i), valid.treatments[i]);
      return total / static_cast<double>(z.cols());
    };
  }
  hooks.parameters_finite = [&]() { return net.all_finite(); };
  nn::DenseNetwork best = net;
  hooks.save_best = [&]() { best = net; };
  hooks.restore_best = [&]() { net = best; };
  TrainingHistory h = run_training(hooks, options, "propensity model");
  if (history != nullptr) *history = std::move(h);
  return model;
}

std::string to_checkpoint(const PropensityModel& model) {
  detail::Json doc = {{"format", "cate.propensity_model"},
                      {"version", 1},
                      {"clip", model.clip()},
                      {"network", detail::network_to_json(model.network())}};
  return doc.dump();
}

PropensityModel propensity_model_from_checkpoint(const std::string& text) {
  const std::string what = "propensity model checkpoint";
  const detail::Json doc = detail::parse_json(text, what);
  try {
    if (detail::require(doc, "format", what).get<std::string>() != "cate.propensity_model") {
      throw IngestionError(what + ": unexpected format tag", 0);
    }
    return PropensityModel(detail::network_from_json(detail::require(doc, "network", what)),
                           detail::require(doc, "clip", what).get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError(what + ": " + e.what(), 0);
  }
}

}  // namespace cate
