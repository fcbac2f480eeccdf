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

// IDX ingestion and the image variant of the confounded benchmark. Each image
// is reduced to a scalar phi in [-2, 2]: its mean intensity is standardized
// within its digit class, clipped to [-2, 2] and mapped affinely onto the
// class interval [-2 + 0.4 c, -2 + 0.4 (c + 1)]. Treatment and outcome then
// follow the one-dimensional benchmark with phi in place of x, while the
// model sees only the pixels (scaled to [0, 1]).

#ifndef CATE_MNIST_HPP_
#define CATE_MNIST_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cate/dataset.hpp"
#include "cate/simulated.hpp"

namespace cate {

struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major per image

  std::size_t image_size() const { return rows * cols; }
  const std::uint8_t* image(std::size_t i) const { return pixels.data() + i * image_size(); }
};

// Big-endian IDX: magic 0x00000803 + count, rows, cols for images;
// 0x00000801 + count for labels. Throws IngestionError with the byte offset.
IdxImages parse_idx_images(const std::string& bytes, const std::string& source = "images");
std::vector<std::uint8_t> parse_idx_labels(const std::string& bytes,
                                           const std::string& source = "labels");
IdxImages read_idx_images(const std::string& path);
std::vector<std::uint8_t> read_idx_labels(const std::string& path);

struct MnistSplit {
  IdxImages images;
  std::vector<std::uint8_t> labels;
};

// Loads train-* and t10k-* files from a directory.
MnistSplit load_mnist(const std::string& dir, bool train);

// Per-class statistics of the mean image intensity (pixel / 255 averaged).
struct PhiMap {
  double class_mean[10] = {};
  double class_sd[10] = {};

  static PhiMap fit(const MnistSplit& data);
  static double class_min(int c) { return -2.0 + 0.4 * c; }
  static double class_max(int c) { return -2.0 + 0.4 * (c + 1); }
  // phi = Min_c + (clip(z, -2, 2) + 2) (Max_c - Min_c) / 4.
  double phi(double mean_intensity, int label) const;
};

double mean_intensity(const std::uint8_t* image, std::size_t size);

struct HcmnistData {
  DatasetSplits splits;
  PhiMap phi_map;
  SimulatedScm scm;
};

// Desk-scale realization: n_train + n_valid images drawn without replacement
// from the training files, n_test from the test files. Every dataset stores
// phi in `latent` and the ground truth of the one-dimensional benchmark.
HcmnistData generate_hcmnist(const MnistSplit& train_files, const MnistSplit& test_files,
                             Eigen::Index n_train, Eigen::Index n_valid, Eigen::Index n_test,
                             double gamma_star, std::uint64_t seed);
HcmnistData generate_hcmnist(const std::string& mnist_dir, Eigen::Index n_train,
                             Eigen::Index n_valid, Eigen::Index n_test, double gamma_star,
                             std::uint64_t seed);

}  // namespace cate

#endif  // CATE_MNIST_HPP_
