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

#include "cate/nn.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "cate/errors.hpp"

namespace cate::nn {
namespace {

std::string dims(Eigen::Index rows, Eigen::Index cols) {
  std::ostringstream out;
  out << rows << "x" << cols;
  return out.str();
}

void apply_activation(Activation act, const Matrix& pre, Matrix& out) {
  switch (act) {
    case Activation::kLinear:
      out = pre;
      return;
    case Activation::kElu:
      out = pre.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
      return;
  }
}

// d act / d pre, multiplied into `grad` in place.
void activation_backward(Activation act, const Matrix& pre, Matrix& grad) {
  if (act == Activation::kElu) {
    grad.array() *=
        pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); }).array();
  }
}

}  // namespace

std::string to_string(Activation activation) {
  switch (activation) {
    case Activation::kLinear:
      return "linear";
    case Activation::kElu:
      return "elu";
  }
  return "unknown";
}

Activation activation_from_string(const std::string& name) {
  if (name == "linear") return Activation::kLinear;
  if (name == "elu") return Activation::kElu;
  throw DomainError("unknown activation '" + name + "'");
}

DenseNetwork::DenseNetwork(std::vector<DenseLayer> layers, double dropout_rate,
                           std::uint64_t seed)
    : layers_(std::move(layers)), dropout_rate_(dropout_rate), seed_(seed) {
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw DomainError("dropout rate must lie in [0, 1)");
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const DenseLayer& l = layers_[i];
    if (l.weight.rows() == 0 || l.weight.cols() == 0) {
      throw ShapeError("layer " + std::to_string(i) + " has an empty weight matrix");
    }
    if (l.bias.size() != l.weight.rows()) {
      throw ShapeError("layer " + std::to_string(i) + ": bias of length " +
                       std::to_string(l.bias.size()) + " for weight " +
                       dims(l.weight.rows(), l.weight.cols()));
    }
    if (i > 0 && layers_[i - 1].out_dim() != l.in_dim()) {
      throw ShapeError("layer " + std::to_string(i) + " expects " +
                       std::to_string(l.in_dim()) + " inputs but layer " +
                       std::to_string(i - 1) + " emits " +
                       std::to_string(layers_[i - 1].out_dim()));
    }
  }
  if (!all_finite()) {
    const Vector flat = flatten();
    for (Eigen::Index k = 0; k < flat.size(); ++k) {
      if (!std::isfinite(flat[k])) {
        throw NumericError("non-finite network parameter", static_cast<std::size_t>(k));
      }
    }
  }
}

Eigen::Index DenseNetwork::input_dim() const {
  return layers_.empty() ? 0 : layers_.front().in_dim();
}

Eigen::Index DenseNetwork::output_dim() const {
  return layers_.empty() ? 0 : layers_.back().out_dim();
}

std::size_t DenseNetwork::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool DenseNetwork::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

Vector DenseNetwork::flatten() const {
  Vector out(static_cast<Eigen::Index>(num_parameters()));
  Eigen::Index pos = 0;
  for (const auto& l : layers_) {
    out.segment(pos, l.weight.size()) = l.weight.reshaped();
    pos += l.weight.size();
    out.segment(pos, l.bias.size()) = l.bias;
    pos += l.bias.size();
  }
  return out;
}

void DenseNetwork::unflatten(const Vector& params) {
  if (params.size() != static_cast<Eigen::Index>(num_parameters())) {
    throw ShapeError("parameter vector of length " + std::to_string(params.size()) +
                     " for a network with " + std::to_string(num_parameters()) +
                     " parameters");
  }
  Eigen::Index pos = 0;
  for (auto& l : layers_) {
    l.weight.reshaped() = params.segment(pos, l.weight.size());
    pos += l.weight.size();
    l.bias = params.segment(pos, l.bias.size());
    pos += l.bias.size();
  }
}

DenseNetwork make_mlp(const MlpSpec& spec, std::uint64_t seed) {
  if (spec.input_dim <= 0) throw ShapeError("network input dimension must be positive");
  std::vector<DenseLayer> layers;
  Rng rng = make_rng(seed, Stream::kInit);
  Eigen::Index in = spec.input_dim;
  auto add = [&](Eigen::Index out, Activation act, bool dropout) {
    if (out <= 0) throw ShapeError("layer width must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    auto u = [&](Rng& g) { return bound * (2.0 * uniform01(g) - 1.0); };
    DenseLayer l;
    l.weight.resize(out, in);
    l.bias.resize(out);
    // Fill order is fixed (column-major weight, then bias) so results do not
    // depend on Eigen internals.
    for (Eigen::Index c = 0; c < in; ++c)
      for (Eigen::Index r = 0; r < out; ++r) l.weight(r, c) = u(rng);
    for (Eigen::Index r = 0; r < out; ++r) l.bias[r] = u(rng);
    l.activation = act;
    l.dropout = dropout;
    layers.push_back(std::move(l));
    in = out;
  };
  for (int width : spec.hidden) add(width, Activation::kElu, spec.dropout_rate > 0.0);
  if (spec.output_dim > 0) add(spec.output_dim, Activation::kLinear, false);
  return DenseNetwork(std::move(layers), spec.dropout_rate, seed);
}

Eigen::Index DropoutMask::batch() const {
  for (const auto& m : layers) {
    if (m.size() > 0) return m.cols();
  }
  return 0;
}

DropoutMask ones_mask(const DenseNetwork& net, Eigen::Index batch) {
  DropoutMask mask;
  mask.keep_probability = 1.0 - net.dropout_rate();
  mask.layers.resize(net.num_layers());
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    const DenseLayer& l = net.layer(i);
    if (l.dropout) mask.layers[i] = Matrix::Ones(l.out_dim(), batch);
  }
  return mask;
}

void sample_mask_column(const DenseNetwork& net, Rng& rng, DropoutMask& mask,
                        Eigen::Index column) {
  const double rate = net.dropout_rate();
  const double keep = 1.0 - rate;
  const double scale = 1.0 / keep;
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    Matrix& m = mask.layers.at(i);
    if (m.size() == 0) continue;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      m(r, column) = (rate > 0.0 && uniform01(rng) < rate) ? 0.0 : scale;
    }
  }
}

DropoutMask sample_mask(const DenseNetwork& net, Rng& rng, Eigen::Index batch) {
  DropoutMask mask = ones_mask(net, batch);
  for (Eigen::Index c = 0; c < batch; ++c) sample_mask_column(net, rng, mask, c);
  return mask;
}

Matrix forward(const DenseNetwork& net, const Matrix& input, const DropoutMask* mask,
               ForwardPass* tape) {
  if (net.empty()) throw ShapeError("forward through an empty network");
  if (input.rows() != net.input_dim()) {
    throw ShapeError("input has " + std::to_string(input.rows()) +
                     " features, network expects " + std::to_string(net.input_dim()));
  }
  if (mask != nullptr && mask->layers.size() != net.num_layers()) {
    throw ShapeError("dropout mask has " + std::to_string(mask->layers.size()) +
                     " layers, network has " + std::to_string(net.num_layers()));
  }
  const Eigen::Index batch = input.cols();
  if (tape != nullptr) {
    tape->valid_ = false;
    tape->inputs_.resize(net.num_layers());
    tape->pre_.resize(net.num_layers());
    tape->masks_.assign(net.num_layers(), Matrix());
  }
  Matrix current = input;
  Matrix pre;
  Matrix act;
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    const DenseLayer& l = net.layer(i);
    pre.noalias() = l.weight * current;
    pre.colwise() += l.bias;
    apply_activation(l.activation, pre, act);
    const Matrix* m = nullptr;
    if (mask != nullptr && l.dropout) {
      m = &mask->layers[i];
      if (m->rows() != l.out_dim() || (m->cols() != batch && m->cols() != 1)) {
        throw ShapeError("dropout mask for layer " + std::to_string(i) + " is " +
                         dims(m->rows(), m->cols()) + ", expected " +
                         dims(l.out_dim(), batch));
      }
      if (m->cols() == batch) {
        act.array() *= m->array();
      } else {
        act.array().colwise() *= m->col(0).array();
      }
    }
    if (tape != nullptr) {
      tape->inputs_[i] = std::move(current);
      tape->pre_[i] = pre;
      if (m != nullptr) tape->masks_[i] = *m;
    }
    current = act;
  }
  if (tape != nullptr) {
    tape->output_ = current;
    tape->batch_ = batch;
    tape->num_layers_ = net.num_layers();
    tape->valid_ = true;
  }
  return current;
}

Vector forward(const DenseNetwork& net, const Vector& input, const DropoutMask* mask) {
  Matrix in = input;
  return forward(net, in, mask, nullptr).col(0);
}

Gradients backward(const DenseNetwork& net, const ForwardPass& tape,
                   const Matrix& output_grad) {
  if (!tape.valid_) throw StateError("backward called without a recorded forward pass");
  if (tape.num_layers_ != net.num_layers() || tape.inputs_.empty() ||
      tape.inputs_.front().rows() != net.input_dim()) {
    throw StateError("forward pass was recorded on a different network");
  }
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    if (tape.pre_[i].rows() != net.layer(i).out_dim()) {
      throw StateError("forward pass was recorded on a different network");
    }
  }
  if (output_grad.rows() != tape.output_.rows() || output_grad.cols() != tape.batch_) {
    throw ShapeError("output gradient is " + dims(output_grad.rows(), output_grad.cols()) +
                     ", forward output was " + dims(tape.output_.rows(), tape.batch_));
  }
  Gradients g;
  g.weight.resize(net.num_layers());
  g.bias.resize(net.num_layers());
  Matrix delta = output_grad;
  for (std::size_t i = net.num_layers(); i-- > 0;) {
    const DenseLayer& l = net.layer(i);
    const Matrix& m = tape.masks_[i];
    if (m.size() > 0) {
      if (m.cols() == delta.cols()) {
        delta.array() *= m.array();
      } else {
        delta.array().colwise() *= m.col(0).array();
      }
    }
    activation_backward(l.activation, tape.pre_[i], delta);
    g.weight[i].noalias() = delta * tape.inputs_[i].transpose();
    g.bias[i] = delta.rowwise().sum();
    Matrix next;
    next.noalias() = l.weight.transpose() * delta;
    delta = std::move(next);
  }
  g.input = std::move(delta);
  return g;
}

Vector Gradients::flatten() const {
  Eigen::Index n = 0;
  for (std::size_t i = 0; i < weight.size(); ++i) n += weight[i].size() + bias[i].size();
  Vector out(n);
  Eigen::Index pos = 0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    out.segment(pos, weight[i].size()) = weight[i].reshaped();
    pos += weight[i].size();
    out.segment(pos, bias[i].size()) = bias[i];
    pos += bias[i].size();
  }
  return out;
}

void Gradients::set_zero_like(const DenseNetwork& net) {
  weight.resize(net.num_layers());
  bias.resize(net.num_layers());
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    weight[i] = Matrix::Zero(net.layer(i).out_dim(), net.layer(i).in_dim());
    bias[i] = Vector::Zero(net.layer(i).out_dim());
  }
  input.resize(0, 0);
}

Gradients& Gradients::operator+=(const Gradients& other) {
  if (other.weight.size() != weight.size()) {
    throw ShapeError("cannot accumulate gradients of different networks");
  }
  for (std::size_t i = 0; i < weight.size(); ++i) {
    weight[i] += other.weight[i];
    bias[i] += other.bias[i];
  }
  return *this;
}

OptimizerState::OptimizerState(const DenseNetwork& net, AdamOptions options)
    : options_(options) {
  for (const auto& l : net.layers()) {
    m_weight_.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    v_weight_.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    m_bias_.push_back(Vector::Zero(l.bias.size()));
    v_bias_.push_back(Vector::Zero(l.bias.size()));
  }
}

void optimizer_step(OptimizerState& state, DenseNetwork& net, const Gradients& grads) {
  const std::size_t n = net.num_layers();
  if (state.m_weight_.size() != n || grads.weight.size() != n || grads.bias.size() != n) {
    throw ShapeError("optimizer state, gradients and network disagree on layer count");
  }
  std::size_t offset = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const DenseLayer& l = net.layer(i);
    if (grads.weight[i].rows() != l.weight.rows() || grads.weight[i].cols() != l.weight.cols() ||
        grads.bias[i].size() != l.bias.size() ||
        state.m_weight_[i].rows() != l.weight.rows() ||
        state.m_weight_[i].cols() != l.weight.cols() || state.m_bias_[i].size() != l.bias.size()) {
      throw ShapeError("gradient shape mismatch at layer " + std::to_string(i));
    }
    if (!grads.weight[i].allFinite()) {
      const double* p = grads.weight[i].data();
      for (Eigen::Index k = 0; k < grads.weight[i].size(); ++k) {
        if (!std::isfinite(p[k])) {
          throw NumericError("non-finite gradient", offset + static_cast<std::size_t>(k));
        }
      }
    }
    offset += static_cast<std::size_t>(l.weight.size());
    if (!grads.bias[i].allFinite()) {
      for (Eigen::Index k = 0; k < grads.bias[i].size(); ++k) {
        if (!std::isfinite(grads.bias[i][k])) {
          throw NumericError("non-finite gradient", offset + static_cast<std::size_t>(k));
        }
      }
    }
    offset += static_cast<std::size_t>(l.bias.size());
  }

  const AdamOptions& o = state.options_;
  ++state.step_;
  const double t = static_cast<double>(state.step_);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g.cwiseProduct(g);
    param.array() -= o.learning_rate * (m.array() / c1) /
                     ((v.array() / c2).sqrt() + o.epsilon);
  };
  for (std::size_t i = 0; i < n; ++i) {
    DenseLayer& l = net.mutable_layers()[i];
    update(l.weight, state.m_weight_[i], state.v_weight_[i], grads.weight[i]);
    update(l.bias, state.m_bias_[i], state.v_bias_[i], grads.bias[i]);
  }
}

}  // namespace cate::nn
