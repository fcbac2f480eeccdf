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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <doctest.h>

#include "cate/dataset.hpp"
#include "cate/errors.hpp"
#include "cate/ihdp.hpp"
#include "cate/mixture.hpp"
#include "cate/mnist.hpp"
#include "cate/simulated.hpp"
#include "oracles.hpp"

using namespace cate;

namespace {

void put_u32(std::string& s, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) s.push_back(static_cast<char>((v >> shift) & 0xff));
}

std::string idx_images(std::uint32_t count, std::uint32_t rows, std::uint32_t cols) {
  std::string s;
  put_u32(s, 0x00000803);
  put_u32(s, count);
  put_u32(s, rows);
  put_u32(s, cols);
  for (std::uint32_t i = 0; i < count * rows * cols; ++i) s.push_back(static_cast<char>(i % 256));
  return s;
}

std::string mnist_dir() {
  const char* env = std::getenv("CATE_MNIST_DIR");
  const std::string dir = env ? env : "/root/data/mnist";
  return std::filesystem::exists(dir + "/train-images-idx3-ubyte") ? dir : "";
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cate_test_datagen";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("closed-form values of the benchmark") {
  CHECK(SimulatedScm::tau(0.0) == 2.0);
  CHECK(SimulatedScm::nominal_propensity(0.0) == doctest::Approx(1.0 / (1.0 + std::exp(-0.5))));
  CHECK(SimulatedScm::nominal_propensity(0.0) == doctest::Approx(0.6225).epsilon(1e-4));
  for (double x : {-2.0, -0.7, 0.3, 1.9}) {
    CHECK(SimulatedScm::arm_mean(x, 1) - SimulatedScm::arm_mean(x, 0) == doctest::Approx(SimulatedScm::tau(x)));
  }
  const SimulatedScm unit(1.0);
  for (double x : {-1.5, 0.0, 1.5}) {
    CHECK(unit.complete_propensity(x, 0) == doctest::Approx(SimulatedScm::nominal_propensity(x)));
    CHECK(unit.complete_propensity(x, 1) == doctest::Approx(SimulatedScm::nominal_propensity(x)));
    CHECK(unit.confounded_bias(x) == 0.0);
  }
  const SimulatedScm strong(std::exp(1.0));
  CHECK(strong.confounded_bias(-2.0) == 0.0);
  const double e = SimulatedScm::nominal_propensity(0.8);
  CHECK(strong.complete_propensity(0.8, 1) == doctest::Approx(1.0 / oracle::alpha_of(e, std::exp(1.0))));
  CHECK(strong.complete_propensity(0.8, 0) == doctest::Approx(1.0 / oracle::beta_of(e, std::exp(1.0))));
}

TEST_CASE("unconfounded treatment frequencies follow the nominal propensity") {
  const Dataset d = generate_simulated(100000, 1.0, 3);
  const int bins = 8;
  double treated[bins] = {}, count[bins] = {};
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const int b = std::min(bins - 1, static_cast<int>((d.covariates(0, i) + 2.0) / 4.0 * bins));
    count[b] += 1.0;
    treated[b] += d.treatments[i];
  }
  for (int b = 0; b < bins; ++b) {
    // Average of sigmoid(0.75 x + 0.5) over the bin.
    const double lo = -2.0 + 4.0 * b / bins, hi = lo + 4.0 / bins;
    auto antideriv = [](double x) { return std::log1p(std::exp(0.75 * x + 0.5)) / 0.75; };
    const double expected = (antideriv(hi) - antideriv(lo)) / (hi - lo);
    CHECK(std::abs(treated[b] / count[b] - expected) <= 0.03);
  }
}

TEST_CASE("confounded bias matches simulation at x = 0") {
  const double gamma = std::exp(1.0);
  const double e = 1.0 / (1.0 + std::exp(-0.5));
  Rng rng(17);
  std::normal_distribution<double> noise(0.0, 1.0);
  double sum[2] = {0, 0}, sq[2] = {0, 0}, n[2] = {0, 0};
  for (int i = 0; i < 1000000; ++i) {
    const int u = uniform01(rng) < 0.5 ? 1 : 0;
    const double p = u == 1 ? 1.0 / oracle::alpha_of(e, gamma) : 1.0 / oracle::beta_of(e, gamma);
    const int t = uniform01(rng) < p ? 1 : 0;
    const double s = 2.0 * t - 1.0;
    const double y = s - 2.0 * (2.0 * u - 1.0) + noise(rng);
    sum[t] += y;
    sq[t] += y * y;
    n[t] += 1.0;
  }
  double se2 = 0.0;
  for (int t = 0; t < 2; ++t) se2 += (sq[t] / n[t] - (sum[t] / n[t]) * (sum[t] / n[t])) / n[t];
  const double mc = sum[1] / n[1] - sum[0] / n[0] - 2.0;
  const SimulatedScm scm(gamma);
  CHECK(std::abs(scm.confounded_bias(0.0) - mc) <= 3.0 * std::sqrt(se2));
  CHECK(scm.observed_mean(0.0, 1) - scm.observed_mean(0.0, 0) - SimulatedScm::tau(0.0) ==
        doctest::Approx(scm.confounded_bias(0.0)));
}

TEST_CASE("generated rows are consistent and reproducible") {
  const Dataset d = generate_simulated(500, std::exp(0.5), 9);
  d.validate();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    CHECK(d.outcomes[i] == d.potential_outcomes(i, static_cast<Eigen::Index>(d.treatments[i])));
    CHECK(d.potential_outcomes(i, 1) - d.potential_outcomes(i, 0) == doctest::Approx(d.true_cate[i]));
  }
  const Dataset prefix = generate_simulated(100, std::exp(0.5), 9);
  CHECK(prefix.covariates == d.covariates.leftCols(100));
  CHECK(generate_simulated(500, std::exp(0.5), 9).outcomes == d.outcomes);
  CHECK_THROWS_AS(generate_simulated(10, 0.5, 1), DomainError);
}

TEST_CASE("idx parsing") {
  const IdxImages img = parse_idx_images(idx_images(3, 2, 4));
  CHECK(img.count == 3);
  CHECK(img.rows == 2);
  CHECK(img.cols == 4);
  CHECK(img.image(2)[1] == 17);

  std::string labels;
  put_u32(labels, 0x00000801);
  put_u32(labels, 4);
  labels += std::string("\x01\x09\x00\x05", 4);
  const auto l = parse_idx_labels(labels);
  REQUIRE(l.size() == 4);
  CHECK(l[1] == 9);
  CHECK(l[2] == 0);

  std::string bad = idx_images(3, 2, 4);
  bad[3] = 0x01;
  CHECK_THROWS_AS(parse_idx_images(bad), IngestionError);
  const std::string truncated = idx_images(3, 2, 4).substr(0, 30);
  CHECK_THROWS_AS(parse_idx_images(truncated), IngestionError);
  CHECK_THROWS_AS(parse_idx_labels(labels.substr(0, 6)), IngestionError);
  CHECK_THROWS_AS(read_idx_images("/nonexistent/file"), IngestionError);
}

TEST_CASE("phi map boundaries") {
  PhiMap map;
  for (int c = 0; c < 10; ++c) {
    map.class_mean[c] = 0.1 + 0.01 * c;
    map.class_sd[c] = 0.02;
  }
  CHECK(map.phi(0.1 - 0.04, 0) == -2.0);
  CHECK(map.phi(0.1 - 1.0, 0) == -2.0);
  CHECK(map.phi(0.19 + 1.0, 9) == 2.0);
  CHECK(map.phi(0.15, 5) == doctest::Approx(0.2));
  CHECK(PhiMap::class_min(3) == doctest::Approx(-0.8));
  CHECK(PhiMap::class_max(3) == doctest::Approx(-0.4));
  const std::uint8_t px[4] = {0, 255, 255, 0};
  CHECK(mean_intensity(px, 4) == 0.5);
}

TEST_CASE("image benchmark keeps phi inside the digit intervals") {
  const std::string dir = mnist_dir();
  if (dir.empty()) {
    MESSAGE("MNIST files not found; skipped");
    return;
  }
  const MnistSplit train = load_mnist(dir, true);
  const PhiMap map = PhiMap::fit(train);
  double lo[10], hi[10];
  std::fill(lo, lo + 10, 9.0);
  std::fill(hi, hi + 10, -9.0);
  for (std::size_t i = 0; i < train.images.count; ++i) {
    const int c = train.labels[i];
    const double phi = map.phi(mean_intensity(train.images.image(i), train.images.image_size()), c);
    lo[c] = std::min(lo[c], phi);
    hi[c] = std::max(hi[c], phi);
  }
  for (int c = 0; c < 10; ++c) {
    CHECK(lo[c] >= PhiMap::class_min(c));
    CHECK(hi[c] <= PhiMap::class_max(c));
    CHECK(hi[c] - lo[c] > 0.3 * 0.4);
  }
  const MnistSplit test = load_mnist(dir, false);
  const HcmnistData h = generate_hcmnist(train, test, 300, 50, 50, std::exp(1.0), 4);
  CHECK(h.splits.train.size() == 300);
  CHECK(h.splits.test.size() == 50);
  CHECK(h.splits.train.dim() == 784);
  CHECK(h.splits.train.covariates.minCoeff() >= 0.0);
  CHECK(h.splits.train.covariates.maxCoeff() <= 1.0);
  CHECK(h.splits.train.latent.cwiseAbs().maxCoeff() <= 2.0);
  for (Eigen::Index i = 0; i < h.splits.train.size(); ++i) {
    CHECK(h.splits.train.true_cate[i] == doctest::Approx(SimulatedScm::tau(h.splits.train.latent[i])));
  }
}

TEST_CASE("hidden-confounder infant health benchmark") {
  const IhdpTable table = surrogate_ihdp_table(0);
  CHECK(table.covariates.cols() == kIhdpRows);
  CHECK(table.treatment.sum() == kIhdpTreated);
  const IhdpData data = generate_ihdp_hidden(table, 5);
  CHECK(data.all.dim() == 24);
  CHECK(data.splits.train.size() == 470);
  CHECK(data.splits.valid.size() == 202);
  CHECK(data.splits.test.size() == 75);
  CHECK(data.scm.beta_u >= 0.1 - 1e-12);
  CHECK(data.scm.beta_u <= 0.5 + 1e-12);
  double catt = 0.0, treated = 0.0;
  for (Eigen::Index i = 0; i < data.all.size(); ++i) {
    if (data.all.treatments[i] == 1.0) {
      catt += data.all.expected_outcomes(i, 1) - data.all.expected_outcomes(i, 0);
      treated += 1.0;
    }
  }
  CHECK(std::abs(catt / treated - 4.0) <= 1e-9);

  const IhdpData plain = generate_ihdp_hidden(table, 5, 0.0);
  for (Eigen::Index i = 0; i < 20; ++i) {
    const Eigen::VectorXd x = plain.all.covariates.col(i);
    CHECK(plain.scm.mu0(x, 0.0) == plain.scm.mu0(x, 1.0));
    CHECK(plain.scm.mu1(x, 0.0) == plain.scm.mu1(x, 1.0));
  }
  CHECK(generate_ihdp_hidden(table, 5).all.outcomes == data.all.outcomes);
}

TEST_CASE("ihdp csv ingestion names missing columns") {
  const auto path = scratch("ihdp_bad.csv");
  {
    std::ofstream out(path);
    out << "treatment,x1,x2\n1,0.5,0.1\n";
  }
  try {
    read_ihdp_csv(path.string());
    FAIL("expected an ingestion error");
  } catch (const IngestionError& e) {
    CHECK(std::string(e.what()).find("x25") != std::string::npos);
  }
}

TEST_CASE("splitting") {
  const Dataset d = generate_simulated(1000, 1.0, 2);
  const DatasetSplits s = split(d, {0.8, 0.1, 0.1}, 4);
  CHECK(s.train.size() == 800);
  CHECK(s.valid.size() == 100);
  CHECK(s.test.size() == 100);
  std::set<double> seen;
  for (const Dataset* p : {&s.train, &s.valid, &s.test}) {
    for (Eigen::Index i = 0; i < p->size(); ++i) seen.insert(p->covariates(0, i));
  }
  CHECK(seen.size() == 1000);
  CHECK(split(d, {0.8, 0.1, 0.1}, 4).valid.outcomes == s.valid.outcomes);
  const DatasetSplits all = split(d, {1.0, 0.0, 0.0}, 4);
  CHECK(all.train.covariates == d.covariates);
  CHECK_THROWS_AS(split(d, {0.5, 0.2, 0.2}, 1), ConfigError);
  CHECK_THROWS_AS(split(generate_simulated(5, 1.0, 1), {0.9, 0.05, 0.05}, 1), ConfigError);
}

TEST_CASE("csv round trip") {
  const Dataset d = generate_simulated(50, std::exp(1.0), 8);
  const auto path = scratch("roundtrip.csv");
  write_dataset_csv(d, path.string());
  const Dataset back = read_dataset_csv(path.string());
  CHECK(back.covariates == d.covariates);
  CHECK(back.outcomes == d.outcomes);
  CHECK(back.true_cate == d.true_cate);
  CHECK(back.potential_outcomes == d.potential_outcomes);
}
