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

// Minimal dense network engine: fully connected layers, ELU activations,
// inverted dropout with explicit masks, reverse-mode gradients and Adam.
//
// Data layout: a batch is a matrix with one column per example, so a layer
// computes  out = act(W * in + b)  with W of shape (out_dim x in_dim).
//
// A DropoutMask fixes one realization of the network parameters (one MC
// dropout sample). Passing no mask evaluates the expectation, i.e. the plain
// network without dropout.

#ifndef CATE_NN_HPP_
#define CATE_NN_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cate/random.hpp"

namespace cate::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { kLinear, kElu };

std::string to_string(Activation activation);
Activation activation_from_string(const std::string& name);

struct DenseLayer {
  Matrix weight;  // out_dim x in_dim
  Vector bias;    // out_dim
  Activation activation = Activation::kLinear;
  bool dropout = false;  // apply dropout to this layer's output

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }
};

class DenseNetwork {
 public:
  DenseNetwork() = default;

  // Validates that consecutive dimensions compose, dropout_rate is in [0, 1)
  // and every parameter is finite. Throws ShapeError / DomainError /
  // NumericError.
  DenseNetwork(std::vector<DenseLayer> layers, double dropout_rate,
               std::uint64_t seed);

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }
  const DenseLayer& layer(std::size_t i) const { return layers_.at(i); }

  std::size_t num_layers() const { return layers_.size(); }
  bool empty() const { return layers_.empty(); }
  double dropout_rate() const { return dropout_rate_; }
  std::uint64_t seed() const { return seed_; }

  // Input/output widths. An empty network is the identity on `passthrough`
  // inputs, so both report 0 there.
  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;

  std::size_t num_parameters() const;
  bool all_finite() const;

  // Flat parameter view, layer by layer: weight (column-major), then bias.
  Vector flatten() const;
  void unflatten(const Vector& params);

 private:
  std::vector<DenseLayer> layers_;
  double dropout_rate_ = 0.0;
  std::uint64_t seed_ = 0;
};

// Architecture recipe for make_mlp.
struct MlpSpec {
  Eigen::Index input_dim = 1;
  std::vector<int> hidden;  // widths of ELU + dropout layers
  // Width of the final linear layer; 0 means no output layer (the network
  // ends with its last hidden layer, as a feature extractor does).
  Eigen::Index output_dim = 1;
  double dropout_rate = 0.0;
};

// Fan-in scaled uniform initialization U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for
// weights and biases, seeded.
DenseNetwork make_mlp(const MlpSpec& spec, std::uint64_t seed);

// One realization of the dropout noise. layers[i] is empty when layer i has no
// dropout; otherwise it is (out_dim x batch) with entries in
// {0, 1/keep_probability}.
struct DropoutMask {
  std::vector<Matrix> layers;
  double keep_probability = 1.0;

  Eigen::Index batch() const;
};

// I.i.d. Bernoulli(1 - rate) masks scaled by 1 / (1 - rate), one column per
// batch element. With rate 0 every entry is 1.
DropoutMask sample_mask(const DenseNetwork& net, Rng& rng, Eigen::Index batch = 1);

// Fills column `column` of an existing mask (shape already set) from `rng`.
void sample_mask_column(const DenseNetwork& net, Rng& rng, DropoutMask& mask,
                        Eigen::Index column);

// Allocates a mask of the right shapes filled with ones.
DropoutMask ones_mask(const DenseNetwork& net, Eigen::Index batch);

class ForwardPass;
struct Gradients;

// Activations recorded by a forward pass, consumed by backward().
class ForwardPass {
 public:
  bool valid() const { return valid_; }
  Eigen::Index batch() const { return batch_; }
  const Matrix& output() const { return output_; }
  void reset() { valid_ = false; }

 private:
  friend Matrix forward(const DenseNetwork&, const Matrix&, const DropoutMask*,
                        ForwardPass*);
  friend Gradients backward(const DenseNetwork&, const ForwardPass&,
                            const Matrix&);

  bool valid_ = false;
  Eigen::Index batch_ = 0;
  std::size_t num_layers_ = 0;
  std::vector<Matrix> inputs_;  // input to layer i
  std::vector<Matrix> pre_;     // pre-activation of layer i
  std::vector<Matrix> masks_;   // mask applied after layer i (may be empty)
  Matrix output_;
};

// Deterministic given (net, input, mask). A mask with a single column is
// shared by every column of the input. Throws ShapeError on dimension
// mismatch.
Matrix forward(const DenseNetwork& net, const Matrix& input,
               const DropoutMask* mask = nullptr, ForwardPass* tape = nullptr);
Vector forward(const DenseNetwork& net, const Vector& input,
               const DropoutMask* mask = nullptr);

struct Gradients {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;
  Matrix input;  // d loss / d input, same shape as the forward input

  Vector flatten() const;
  void set_zero_like(const DenseNetwork& net);
  Gradients& operator+=(const Gradients& other);
};

// Reverse pass for a scalar loss whose gradient with respect to the network
// output is `output_grad` (same shape as the forward output). Throws
// StateError when `tape` does not hold a forward pass of this network.
Gradients backward(const DenseNetwork& net, const ForwardPass& tape,
                   const Matrix& output_grad);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class OptimizerState {
 public:
  OptimizerState() = default;
  OptimizerState(const DenseNetwork& net, AdamOptions options = {});

  const AdamOptions& options() const { return options_; }
  std::int64_t step_count() const { return step_; }
  double learning_rate() const { return options_.learning_rate; }

 private:
  friend void optimizer_step(OptimizerState&, DenseNetwork&, const Gradients&);

  AdamOptions options_;
  std::int64_t step_ = 0;
  std::vector<Matrix> m_weight_, v_weight_;
  std::vector<Vector> m_bias_, v_bias_;
};

// Bias-corrected Adam update in place. Throws ShapeError when shapes disagree
// and NumericError (carrying the flat parameter index) on a non-finite
// gradient; parameters are left untouched in both cases.
void optimizer_step(OptimizerState& state, DenseNetwork& net,
                    const Gradients& grads);

// Checkpoints: self-describing JSON with layer dimensions, parameters,
// dropout rate and seed. Round trips are bit-exact.
std::string to_checkpoint(const DenseNetwork& net);
DenseNetwork network_from_checkpoint(const std::string& text);

}  // namespace cate::nn

#endif  // CATE_NN_HPP_
