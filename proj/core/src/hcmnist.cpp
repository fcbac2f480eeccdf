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

#include <algorithm>
#include <cmath>

#include "cate/errors.hpp"
#include "cate/mnist.hpp"
#include "cate/random.hpp"

namespace cate {
namespace {

Dataset build(const MnistSplit& files, const std::vector<std::size_t>& picks, const PhiMap& map,
              const SimulatedScm& scm, std::uint64_t row_seed, Split tag) {
  const auto n = static_cast<Eigen::Index>(picks.size());
  const auto size = files.images.image_size();
  Dataset d;
  d.covariates.resize(static_cast<Eigen::Index>(size), n);
  d.treatments.resize(n);
  d.outcomes.resize(n);
  d.hidden_confounder.resize(n);
  d.potential_outcomes.resize(n, 2);
  d.expected_outcomes.resize(n, 2);
  d.true_cate.resize(n);
  d.latent.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t idx = picks[static_cast<std::size_t>(i)];
    const std::uint8_t* img = files.images.image(idx);
    for (std::size_t p = 0; p < size; ++p) {
      d.covariates(static_cast<Eigen::Index>(p), i) = img[p] / 255.0;
    }
    const double phi = map.phi(mean_intensity(img, size), files.labels[idx]);
    Rng rng = make_rng(row_seed, Stream::kDataRow, {static_cast<std::uint64_t>(i)});
    const int u = uniform01(rng) < 0.5 ? 1 : 0;
    const int t = uniform01(rng) < scm.complete_propensity(phi, u) ? 1 : 0;
    std::normal_distribution<double> normal(0.0, 1.0);
    const double noise = normal(rng);
    d.latent[i] = phi;
    d.hidden_confounder[i] = u;
    d.treatments[i] = t;
    for (int a = 0; a < 2; ++a) {
      d.expected_outcomes(i, a) = SimulatedScm::conditional_mean(phi, a, u);
      d.potential_outcomes(i, a) = d.expected_outcomes(i, a) + noise;
    }
    d.outcomes[i] = d.potential_outcomes(i, t);
    d.true_cate[i] = SimulatedScm::tau(phi);
  }
  d.split = tag;
  d.name = "hcmnist";
  d.gamma_star = scm.gamma_star();
  return d;
}

}  // namespace

double mean_intensity(const std::uint8_t* image, std::size_t size) {
  double s = 0.0;
  for (std::size_t p = 0; p < size; ++p) s += image[p];
  return s / (255.0 * static_cast<double>(size));
}

PhiMap PhiMap::fit(const MnistSplit& data) {
  PhiMap m;
  double count[10] = {};
  double sum[10] = {};
  double sq[10] = {};
  const auto size = data.images.image_size();
  for (std::size_t i = 0; i < data.images.count; ++i) {
    const int c = data.labels[i];
    const double v = mean_intensity(data.images.image(i), size);
    count[c] += 1.0;
    sum[c] += v;
    sq[c] += v * v;
  }
  for (int c = 0; c < 10; ++c) {
    if (count[c] < 2.0) throw IngestionError("digit " + std::to_string(c) + " has fewer than two images", 0);
    m.class_mean[c] = sum[c] / count[c];
    const double var = (sq[c] - count[c] * m.class_mean[c] * m.class_mean[c]) / count[c];
    m.class_sd[c] = std::sqrt(std::max(var, 1e-24));
  }
  return m;
}

double PhiMap::phi(double intensity, int label) const {
  if (label < 0 || label > 9) throw DomainError("digit label must lie in 0..9");
  const double z = std::clamp((intensity - class_mean[label]) / class_sd[label], -2.0, 2.0);
  return class_min(label) + (z + 2.0) * (class_max(label) - class_min(label)) / 4.0;
}

HcmnistData generate_hcmnist(const MnistSplit& train_files, const MnistSplit& test_files,
                             Eigen::Index n_train, Eigen::Index n_valid, Eigen::Index n_test,
                             double gamma_star, std::uint64_t seed) {
  if (n_train < 1 || n_valid < 0 || n_test < 0) throw DomainError("invalid HC-MNIST split sizes");
  if (static_cast<std::size_t>(n_train + n_valid) > train_files.images.count ||
      static_cast<std::size_t>(n_test) > test_files.images.count) {
    throw DomainError("requested more images than available");
  }
  HcmnistData out{{}, PhiMap::fit(train_files), SimulatedScm(gamma_star)};
  Rng pick_rng = make_rng(seed, Stream::kSplit);
  const auto perm = random_permutation(train_files.images.count, pick_rng);
  std::vector<std::size_t> train_idx(perm.begin(), perm.begin() + n_train);
  std::vector<std::size_t> valid_idx(perm.begin() + n_train, perm.begin() + n_train + n_valid);
  const auto test_perm = random_permutation(test_files.images.count, pick_rng);
  std::vector<std::size_t> test_idx(test_perm.begin(), test_perm.begin() + n_test);
  out.splits.train = build(train_files, train_idx, out.phi_map, out.scm,
                           derive_seed(seed, Stream::kTrainData), Split::kTrain);
  out.splits.valid = build(train_files, valid_idx, out.phi_map, out.scm,
                           derive_seed(seed, Stream::kValidData), Split::kValid);
  out.splits.test = build(test_files, test_idx, out.phi_map, out.scm,
                          derive_seed(seed, Stream::kTestData), Split::kTest);
  for (Dataset* d : {&out.splits.train, &out.splits.valid, &out.splits.test}) d->seed = seed;
  return out;
}

HcmnistData generate_hcmnist(const std::string& mnist_dir, Eigen::Index n_train,
                             Eigen::Index n_valid, Eigen::Index n_test, double gamma_star,
                             std::uint64_t seed) {
  return generate_hcmnist(load_mnist(mnist_dir, true), load_mnist(mnist_dir, false), n_train,
                          n_valid, n_test, gamma_star, seed);
}

}  // namespace cate
