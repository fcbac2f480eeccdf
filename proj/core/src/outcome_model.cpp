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

#include "cate/outcome_model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cate/errors.hpp"
#include "json_io.hpp"

namespace cate {
namespace {

constexpr Eigen::Index kEvalChunk = 2048;

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = m.col(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

// Trunk input [features; t].
Eigen::MatrixXd trunk_input(const Eigen::MatrixXd& features, const Eigen::VectorXd& t) {
  Eigen::MatrixXd in(features.rows() + 1, features.cols());
  in.topRows(features.rows()) = features;
  in.row(features.rows()) = t.transpose();
  return in;
}

}  // namespace

OutcomeModel::OutcomeModel(Eigen::Index covariate_dim, const OutcomeModelSpec& spec,
                           std::uint64_t seed)
    : covariate_dim_(covariate_dim), components_(spec.components) {
  if (covariate_dim < 1) throw ShapeError("outcome model needs at least one covariate");
  if (spec.components < 1) throw DomainError("mixture needs at least one component");
  if (spec.hidden.empty()) throw ShapeError("outcome trunk needs at least one hidden layer");
  Eigen::Index feature_dim = covariate_dim;
  if (!spec.encoder_hidden.empty()) {
    encoder_ = nn::make_mlp({covariate_dim, spec.encoder_hidden, 0, spec.dropout_rate},
                            derive_seed(seed, Stream::kModel, {1}));
    feature_dim = encoder_.output_dim();
  }
  trunk_ = nn::make_mlp({feature_dim + 1, spec.hidden, 3 * spec.components, spec.dropout_rate},
                        derive_seed(seed, Stream::kModel, {2}));
}

OutcomeModel::OutcomeModel(nn::DenseNetwork encoder, nn::DenseNetwork trunk, int components,
                           double y_shift, double y_scale)
    : components_(components), encoder_(std::move(encoder)), trunk_(std::move(trunk)) {
  if (trunk_.empty()) throw ShapeError("outcome model needs a trunk");
  if (components < 1 || trunk_.output_dim() != 3 * components) {
    throw ShapeError("trunk output width " + std::to_string(trunk_.output_dim()) +
                     " does not match " + std::to_string(components) + " mixture components");
  }
  const Eigen::Index feature_dim = trunk_.input_dim() - 1;
  if (!encoder_.empty()) {
    if (encoder_.output_dim() != feature_dim) {
      throw ShapeError("encoder output does not match trunk input");
    }
    covariate_dim_ = encoder_.input_dim();
  } else {
    covariate_dim_ = feature_dim;
  }
  set_standardization(y_shift, y_scale);
}

void OutcomeModel::set_standardization(double shift, double scale) {
  if (!std::isfinite(shift) || !std::isfinite(scale) || !(scale > 0.0)) {
    throw DomainError("outcome standardization must be finite with positive scale");
  }
  y_shift_ = shift;
  y_scale_ = scale;
}

ModelMask OutcomeModel::sample_mask(Rng& rng) const {
  ModelMask m;
  if (!encoder_.empty()) m.encoder = nn::sample_mask(encoder_, rng, 1);
  m.trunk = nn::sample_mask(trunk_, rng, 1);
  return m;
}

Eigen::MatrixXd OutcomeModel::head(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                                   const ModelMask* mask) const {
  if (x.rows() != covariate_dim_) {
    throw ShapeError("covariates have " + std::to_string(x.rows()) + " rows, model expects " +
                     std::to_string(covariate_dim_));
  }
  if (t.size() != x.cols()) throw ShapeError("one treatment per covariate column required");
  Eigen::MatrixXd out(trunk_.output_dim(), x.cols());
  for (Eigen::Index start = 0; start < x.cols(); start += kEvalChunk) {
    const Eigen::Index len = std::min(kEvalChunk, x.cols() - start);
    Eigen::MatrixXd features;
    if (encoder_.empty()) {
      features = x.middleCols(start, len);
    } else {
      features = nn::forward(encoder_, Eigen::MatrixXd(x.middleCols(start, len)),
                             mask ? &mask->encoder : nullptr);
    }
    out.middleCols(start, len) =
        nn::forward(trunk_, trunk_input(features, t.segment(start, len)),
                    mask ? &mask->trunk : nullptr);
  }
  return out;
}

std::vector<MixtureParams> OutcomeModel::params(const Eigen::MatrixXd& x, int t,
                                                const ModelMask* mask) const {
  if (t != 0 && t != 1) throw DomainError("treatment must be 0 or 1");
  const Eigen::MatrixXd h = head(x, Eigen::VectorXd::Constant(x.cols(), t), mask);
  std::vector<MixtureParams> out;
  out.reserve(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    out.push_back(rescale(mixture_from_head(h.col(i).data(), components_), y_shift_, y_scale_));
  }
  return out;
}

MixtureParams OutcomeModel::params(const Eigen::VectorXd& x, int t, const ModelMask* mask) const {
  return params(Eigen::MatrixXd(x), t, mask).front();
}

double nll_loss(const OutcomeModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                const Eigen::VectorXd& y, const ModelMask* mask) {
  if (x.cols() == 0) throw ShapeError("nll_loss on an empty batch");
  if (y.size() != x.cols()) throw ShapeError("one outcome per covariate column required");
  const Eigen::MatrixXd h = model.head(x, t, mask);
  const double log_scale = std::log(model.y_scale());
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double ys = (y[i] - model.y_shift()) / model.y_scale();
    const double v = head_nll(h.col(i).data(), model.components(), ys, nullptr) + log_scale;
    if (!std::isfinite(v)) {
      throw NumericError("non-finite negative log density for sample " + std::to_string(i),
                         static_cast<std::size_t>(i));
    }
    total += v;
  }
  return total / static_cast<double>(x.cols());
}

double conditional_mean(const OutcomeModel& model, const Eigen::VectorXd& x, int t,
                        const ModelMask* mask) {
  return mixture_mean(model.params(x, t, mask));
}

std::vector<double> sample_y(const OutcomeModel& model, const Eigen::VectorXd& x, int t,
                             const ModelMask* mask, std::size_t m, Rng& rng) {
  if (m < 1) throw DomainError("sample_y needs m >= 1");
  return sample_mixture(model.params(x, t, mask), m, rng);
}

double cdf(const OutcomeModel& model, const Eigen::VectorXd& x, int t, const ModelMask* mask,
           double y) {
  return mixture_cdf(model.params(x, t, mask), y);
}

TrainingHistory fit_outcome_model(OutcomeModel& model, const Dataset& train,
                                  const Dataset& valid, const TrainingOptions& options) {
  train.validate();
  if (train.size() < 2) throw TrainingError("outcome model: need at least two training rows");
  if (train.dim() != model.covariate_dim()) {
    throw ShapeError("training covariates do not match the outcome model");
  }
  const double mean = train.outcomes.mean();
  const double sd = std::sqrt((train.outcomes.array() - mean).square().sum() /
                              static_cast<double>(train.size() - 1));
  model.set_standardization(mean, sd > 1e-12 ? sd : 1.0);

  const Eigen::VectorXd ys_train = (train.outcomes.array() - mean) / model.y_scale();
  Eigen::VectorXd ys_valid;
  if (valid.size() > 0) ys_valid = (valid.outcomes.array() - mean) / model.y_scale();

  nn::AdamOptions adam;
  adam.learning_rate = options.learning_rate;
  nn::DenseNetwork& enc = model.mutable_encoder();
  nn::DenseNetwork& trunk = model.mutable_trunk();
  nn::OptimizerState enc_state(enc, adam);
  nn::OptimizerState trunk_state(trunk, adam);
  const int J = model.components();
  const Eigen::Index feature_dim = trunk.input_dim() - 1;

  nn::ForwardPass enc_tape;
  nn::ForwardPass trunk_tape;
  Eigen::MatrixXd grad;

  TrainingHooks hooks;
  hooks.num_train = static_cast<std::size_t>(train.size());
  hooks.train_batch = [&](const std::vector<std::size_t>& rows, Rng& mask_rng) {
    const auto B = static_cast<Eigen::Index>(rows.size());
    const Eigen::MatrixXd xb = gather_columns(train.covariates, rows);
    Eigen::VectorXd tb(B);
    for (Eigen::Index i = 0; i < B; ++i) tb[i] = train.treatments[static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)])];
    Eigen::MatrixXd features;
    nn::DropoutMask enc_mask;
    if (!enc.empty()) {
      enc_mask = nn::sample_mask(enc, mask_rng, B);
      features = nn::forward(enc, xb, &enc_mask, &enc_tape);
    } else {
      features = xb;
    }
    const nn::DropoutMask trunk_mask = nn::sample_mask(trunk, mask_rng, B);
    const Eigen::MatrixXd h = nn::forward(trunk, trunk_input(features, tb), &trunk_mask, &trunk_tape);
    grad.resize(h.rows(), B);
    double total = 0.0;
    for (Eigen::Index i = 0; i < B; ++i) {
      const double y = ys_train[static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)])];
      total += head_nll(h.col(i).data(), J, y, grad.col(i).data());
    }
    grad /= static_cast<double>(B);
    const nn::Gradients tg = nn::backward(trunk, trunk_tape, grad);
    if (!enc.empty()) {
      const nn::Gradients eg = nn::backward(enc, enc_tape, tg.input.topRows(feature_dim));
      nn::optimizer_step(enc_state, enc, eg);
    }
    nn::optimizer_step(trunk_state, trunk, tg);
    return total;
  };
  if (valid.size() > 0) {
    hooks.validation_loss = [&]() {
      const Eigen::MatrixXd h = model.head(valid.covariates, valid.treatments, nullptr);
      double total = 0.0;
      for (Eigen::Index i = 0; i < h.cols(); ++i) total += head_nll(h.col(i).data(), J, ys_valid[i], nullptr);
      return total / static_cast<double>(h.cols());
    };
  }
  hooks.parameters_finite = [&]() { return enc.all_finite() && trunk.all_finite(); };
  nn::DenseNetwork best_enc = enc;
  nn::DenseNetwork best_trunk = trunk;
  hooks.save_best = [&]() {
    best_enc = enc;
    best_trunk = trunk;
  };
  hooks.restore_best = [&]() {
    enc = best_enc;
    trunk = best_trunk;
  };
  return run_training(hooks, options, "outcome model");
}

std::string to_checkpoint(const OutcomeModel& model) {
  detail::Json doc = {{"format", "cate.outcome_model"},
                      {"version", 1},
                      {"components", model.components()},
                      {"y_shift", model.y_shift()},
                      {"y_scale", model.y_scale()},
                      {"encoder", detail::network_to_json(model.encoder())},
                      {"trunk", detail::network_to_json(model.trunk())}};
  return doc.dump();
}

OutcomeModel outcome_model_from_checkpoint(const std::string& text) {
  const std::string what = "outcome model checkpoint";
  const detail::Json doc = detail::parse_json(text, what);
  try {
    if (detail::require(doc, "format", what).get<std::string>() != "cate.outcome_model") {
      throw IngestionError(what + ": unexpected format tag", 0);
    }
    return OutcomeModel(detail::network_from_json(detail::require(doc, "encoder", what)),
                        detail::network_from_json(detail::require(doc, "trunk", what)),
                        detail::require(doc, "components", what).get<int>(),
                        detail::require(doc, "y_shift", what).get<double>(),
                        detail::require(doc, "y_scale", what).get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError(what + ": " + e.what(), 0);
  }
}

}  // namespace cate
