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


#include <cmath>
#include <vector>

#include <doctest.h>

#include "cate/errors.hpp"
#include "cate/nn.hpp"
#include "oracles.hpp"

using namespace cate;
using namespace cate::nn;

namespace {

DenseLayer layer(Matrix w, Vector b, Activation act, bool dropout = false) {
  DenseLayer l;
  l.weight = std::move(w);
  l.bias = std::move(b);
  l.activation = act;
  l.dropout = dropout;
  return l;
}

std::vector<std::vector<double>> rows_of(const Matrix& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)].push_back(m(r, c));
  }
  return out;
}

double relative_error(const Vector& a, const Vector& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

}  // namespace

TEST_CASE("zero-weight layer returns its bias") {
  Vector b(3);
  b << 0.5, -1.0, 2.0;
  DenseNetwork net({layer(Matrix::Zero(3, 4), b, Activation::kLinear)}, 0.0, 0);
  Vector x = Vector::LinSpaced(4, -3.0, 3.0);
  CHECK(forward(net, x) == b);
}

TEST_CASE("identity layer passes the input through") {
  DenseNetwork net({layer(Matrix::Identity(5, 5), Vector::Zero(5), Activation::kLinear)}, 0.0, 0);
  Vector v(5);
  v << 1.5, -2.0, 0.0, 3.25, -0.125;
  CHECK(forward(net, v) == v);
}

TEST_CASE("two-layer forward matches a loop implementation") {
  DenseNetwork net = make_mlp({3, {7}, 2, 0.0}, 11);
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(3);
    for (double& v : x) v = 4.0 * uniform01(rng) - 2.0;
    const auto h = oracle::dense_layer(rows_of(net.layer(0).weight),
                                       {net.layer(0).bias.data(), net.layer(0).bias.data() + 7}, x, true);
    const auto y = oracle::dense_layer(rows_of(net.layer(1).weight),
                                       {net.layer(1).bias.data(), net.layer(1).bias.data() + 2}, h, false);
    const Vector out = forward(net, Vector(Eigen::Map<Vector>(x.data(), 3)));
    for (int i = 0; i < 2; ++i) CHECK(out[i] == doctest::Approx(y[static_cast<std::size_t>(i)]).epsilon(1e-13));
  }
}

TEST_CASE("forward rejects mismatched shapes") {
  DenseNetwork net = make_mlp({3, {4}, 1, 0.1}, 1);
  CHECK_THROWS_AS(forward(net, Vector(Vector::Zero(2))), ShapeError);
  DropoutMask bad = ones_mask(net, 3);
  CHECK_THROWS_AS(forward(net, Matrix(Matrix::Zero(3, 2)), &bad), ShapeError);
  CHECK_THROWS_AS(DenseNetwork({layer(Matrix::Zero(2, 3), Vector::Zero(2), Activation::kLinear),
                                layer(Matrix::Zero(1, 4), Vector::Zero(1), Activation::kLinear)},
                               0.0, 0),
                  ShapeError);
}

TEST_CASE("scalar linear model gradient by hand") {
  // y = w x with w = 2, x = 1, loss (y - 0)^2 -> dL/dw = 2 * 2 * 1 = 4.
  DenseNetwork net({layer(Matrix::Constant(1, 1, 2.0), Vector::Zero(1), Activation::kLinear)}, 0.0, 0);
  ForwardPass tape;
  const Matrix out = forward(net, Matrix::Constant(1, 1, 1.0), nullptr, &tape);
  const Gradients g = backward(net, tape, 2.0 * out);
  CHECK(g.weight[0](0, 0) == 4.0);
  CHECK(g.bias[0](0) == 4.0);
}

TEST_CASE("constant loss has zero gradients") {
  DenseNetwork net = make_mlp({4, {6, 5}, 3, 0.0}, 3);
  ForwardPass tape;
  forward(net, Matrix(Matrix::Random(4, 8)), nullptr, &tape);
  const Gradients g = backward(net, tape, Matrix::Zero(3, 8));
  CHECK(g.flatten().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backward without a forward pass is a state error") {
  DenseNetwork net = make_mlp({2, {3}, 1, 0.0}, 3);
  ForwardPass tape;
  CHECK_THROWS_AS(backward(net, tape, Matrix::Zero(1, 1)), StateError);
  DenseNetwork other = make_mlp({2, {4}, 1, 0.0}, 3);
  forward(other, Matrix(Matrix::Zero(2, 1)), nullptr, &tape);
  CHECK_THROWS_AS(backward(net, tape, Matrix::Zero(1, 1)), StateError);
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const auto in = static_cast<Eigen::Index>(1 + trial % 4);
    DenseNetwork net = make_mlp({in, {5, 4}, 2, 0.2}, 100 + static_cast<std::uint64_t>(trial));
    Rng mask_rng(static_cast<std::uint64_t>(trial));
    const DropoutMask mask = sample_mask(net, mask_rng, 3);
    Matrix x(in, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 2.0 * uniform01(rng) - 1.0;
    Matrix r(2, 3);
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = 2.0 * uniform01(rng) - 1.0;

    ForwardPass tape;
    forward(net, x, &mask, &tape);
    const Gradients g = backward(net, tape, r);

    auto loss = [&](const std::vector<double>& p) {
      DenseNetwork copy = net;
      copy.unflatten(Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())));
      return (forward(copy, x, &mask).array() * r.array()).sum();
    };
    const Vector flat = net.flatten();
    const auto fd = oracle::central_difference(loss, {flat.data(), flat.data() + flat.size()}, 1e-6);
    CHECK(relative_error(g.flatten(), Eigen::Map<const Vector>(fd.data(), flat.size())) <= 1e-4);

    auto input_loss = [&](const std::vector<double>& p) {
      return (forward(net, Matrix(Eigen::Map<const Matrix>(p.data(), in, 3)), &mask).array() * r.array()).sum();
    };
    const auto fdx = oracle::central_difference(input_loss, {x.data(), x.data() + x.size()}, 1e-6);
    CHECK(relative_error(Eigen::Map<const Vector>(g.input.data(), g.input.size()),
                         Eigen::Map<const Vector>(fdx.data(), x.size())) <= 1e-4);
  }
}

TEST_CASE("a single-column mask is shared across the batch") {
  DenseNetwork net = make_mlp({2, {8}, 1, 0.5}, 9);
  Rng rng(3);
  const DropoutMask one = sample_mask(net, rng, 1);
  DropoutMask wide = ones_mask(net, 4);
  for (std::size_t i = 0; i < one.layers.size(); ++i) {
    if (one.layers[i].size() > 0) wide.layers[i] = one.layers[i].replicate(1, 4);
  }
  Matrix x = Matrix::Random(2, 4);
  CHECK(forward(net, x, &one) == forward(net, x, &wide));
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  DenseNetwork net = make_mlp({3, {4}, 2, 0.0}, 1);
  const Vector before = net.flatten();
  OptimizerState state(net);
  Gradients g;
  g.set_zero_like(net);
  for (int i = 0; i < 5; ++i) optimizer_step(state, net, g);
  CHECK(net.flatten() == before);
}

TEST_CASE("adam: first step with unit gradient moves by the step size") {
  // m1 = 0.1, v1 = 0.001; bias correction gives m = 1, v = 1, so the step is
  // lr / (1 + eps).
  DenseNetwork net({layer(Matrix::Constant(1, 1, 0.3), Vector::Constant(1, -0.2), Activation::kLinear)}, 0.0, 0);
  AdamOptions o;
  o.learning_rate = 0.01;
  OptimizerState state(net, o);
  Gradients g;
  g.set_zero_like(net);
  g.weight[0](0, 0) = 1.0;
  g.bias[0](0) = 1.0;
  optimizer_step(state, net, g);
  const double expected = 0.01 / (1.0 + 1e-8);
  CHECK(net.layer(0).weight(0, 0) == doctest::Approx(0.3 - expected).epsilon(1e-14));
  CHECK(net.layer(0).bias(0) == doctest::Approx(-0.2 - expected).epsilon(1e-14));
}

TEST_CASE("adam: constant gradient moves against its sign") {
  DenseNetwork net = make_mlp({2, {3}, 1, 0.0}, 4);
  const Vector before = net.flatten();
  OptimizerState state(net);
  Gradients g;
  g.set_zero_like(net);
  for (auto& w : g.weight) w.setConstant(-0.7);
  for (auto& b : g.bias) b.setConstant(-0.7);
  for (int i = 0; i < 50; ++i) optimizer_step(state, net, g);
  CHECK(((net.flatten() - before).array() > 0.0).all());
}

TEST_CASE("adam: non-finite gradient reports its flat index and leaves parameters") {
  DenseNetwork net = make_mlp({2, {3}, 1, 0.0}, 4);
  const Vector before = net.flatten();
  OptimizerState state(net);
  Gradients g;
  g.set_zero_like(net);
  g.bias[1](0) = std::nan("");
  // Layer 0: 6 weights + 3 biases, layer 1: 3 weights, then the bias.
  try {
    optimizer_step(state, net, g);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.index() == 12u);
  }
  CHECK(net.flatten() == before);
}

TEST_CASE("dropout masks") {
  DenseNetwork none = make_mlp({3, {10, 10}, 1, 0.0}, 1);
  Rng rng(1);
  const DropoutMask ones = sample_mask(none, rng, 5);
  for (const auto& m : ones.layers) {
    if (m.size() > 0) CHECK((m.array() == 1.0).all());
  }

  DenseNetwork net = make_mlp({3, {100, 100}, 1, 0.1}, 1);
  Rng a(77), b(77);
  const DropoutMask ma = sample_mask(net, a, 500);
  const DropoutMask mb = sample_mask(net, b, 500);
  double kept = 0.0, total = 0.0;
  for (std::size_t i = 0; i < ma.layers.size(); ++i) {
    CHECK(ma.layers[i] == mb.layers[i]);
    if (ma.layers[i].size() == 0) continue;
    kept += static_cast<double>((ma.layers[i].array() > 0.0).count());
    total += static_cast<double>(ma.layers[i].size());
    CHECK(((ma.layers[i].array() == 0.0) || (ma.layers[i].array() == 1.0 / 0.9)).all());
  }
  CHECK(total == 100000.0);
  CHECK(kept / total == doctest::Approx(0.9).epsilon(0.01 / 0.9));
}

TEST_CASE("checkpoint round trip is exact") {
  DenseNetwork net = make_mlp({4, {6, 5}, 3, 0.25}, 123);
  const DenseNetwork back = network_from_checkpoint(to_checkpoint(net));
  CHECK(back.flatten() == net.flatten());
  CHECK(back.dropout_rate() == net.dropout_rate());
  CHECK(back.seed() == net.seed());
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    CHECK(back.layer(i).activation == net.layer(i).activation);
    CHECK(back.layer(i).dropout == net.layer(i).dropout);
  }
  CHECK_THROWS_AS(network_from_checkpoint("{\"format\": \"other\"}"), Error);
  CHECK_THROWS_AS(network_from_checkpoint("{not json"), IngestionError);
}
