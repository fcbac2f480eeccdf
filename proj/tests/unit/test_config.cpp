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
#include <string>

#include <doctest.h>

#include "cate/config.hpp"
#include "cate/errors.hpp"

using namespace cate;

namespace {

bool mentions(const ConfigError& e, const std::string& text) {
  for (const auto& p : e.problems()) {
    if (p.find(text) != std::string::npos) return true;
  }
  return false;
}

ConfigError rejection(const std::string& json) {
  try {
    validate_config(json);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("config was accepted: " << json);
  return ConfigError({});
}

}  // namespace

TEST_CASE("empty document yields the simulated defaults") {
  const ExperimentConfig c = validate_config("{}");
  CHECK(c.dataset.kind == DatasetKind::kSimulated);
  CHECK(c.dataset.n_train == 1000);
  CHECK(c.dataset.log_gamma_stars == std::vector<double>{1.0});
  CHECK(c.sensitivity.log_gammas == std::vector<double>{0.0, 0.5, 1.0, 1.5});
  CHECK(c.sensitivity.multiplier == 2.0);
  CHECK(c.seeds == std::vector<std::uint64_t>{0});
  const auto g = c.gammas();
  CHECK(g[0] == 1.0);
  CHECK(g[2] == std::exp(1.0));
  CHECK(c.propensity_spec().clip == 0.01);
}

TEST_CASE("gammas below one are rejected") {
  const ConfigError e = rejection(R"({"sensitivity": {"gammas": [0.5, 1.0]}})");
  CHECK(mentions(e, "below 1"));
  CHECK(mentions(rejection(R"({"sensitivity": {"gammas": [1.0], "log_gammas": [0.0]}})"), "not both"));
  CHECK(mentions(rejection(R"({"sensitivity": {"log_gammas": [0.0, 1.0, 0.5]}})"), "increasing"));
  const ExperimentConfig c = validate_config(R"({"sensitivity": {"gammas": [1.0, 2.0]}})");
  CHECK(c.sensitivity.log_gammas[1] == doctest::Approx(std::log(2.0)));
}

TEST_CASE("ihdp defaults and fixed sizes") {
  const ExperimentConfig c = validate_config(R"({"dataset": {"kind": "ihdp"}, "num_seeds": 3})");
  CHECK(c.model.dropout_rate == 0.5);
  CHECK(c.model.batch_size == 100);
  CHECK(c.dataset.n_train == 470);
  CHECK(c.sensitivity.deferral.enabled);
  CHECK(c.sensitivity.log_gammas.size() == 17);
  CHECK(c.sensitivity.deferral.multipliers.back() == 2.0);
  CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(mentions(rejection(R"({"dataset": {"kind": "ihdp", "n_train": 10}})"), "fixed for ihdp"));
  const ExperimentConfig back = validate_config(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("unknown keys and bad values are all reported") {
  const ConfigError e = rejection(
      R"({"dataset": {"kind": "simulated", "n_trian": 5}, "model": {"dropout_rate": 1.0, "components": 0}})");
  CHECK(mentions(e, "n_trian"));
  CHECK(mentions(e, "dropout_rate"));
  CHECK(mentions(e, "components"));
  CHECK(e.problems().size() >= 3);
  CHECK(mentions(rejection(R"({"bogus": 1})"), "bogus"));
  CHECK(mentions(rejection(R"({"dataset": {"kind": "tabular"}})"), "dataset.kind"));
  CHECK(mentions(rejection(R"({"seeds": [1, 1]})"), "duplicates"));
  CHECK(mentions(rejection(R"({"seeds": [1], "num_seeds": 2})"), "not both"));
  CHECK(mentions(rejection(R"({"dataset": {"ihdp_csv": "/nonexistent.csv"}})"), "does not exist"));
  CHECK(mentions(rejection(R"({"dataset": {"kind": "hcmnist", "mnist_dir": "/nonexistent"}})"), "mnist_dir"));
  CHECK_THROWS_AS(validate_config("{not json"), ConfigError);
}

TEST_CASE("deferral needs the unit gamma first") {
  CHECK(mentions(rejection(R"({"sensitivity": {"log_gammas": [0.5, 1.0], "deferral": {"enabled": true}}})"),
                 "log gamma 0"));
}

TEST_CASE("canonical json round trips") {
  const ExperimentConfig c = validate_config(
      R"({"dataset": {"log_gamma_star": [0.5, 1.0]}, "model": {"hidden": [8, 8], "max_epochs": 3},
          "seeds": [4, 7], "workers": 2})");
  CHECK(c.dataset.log_gamma_stars == std::vector<double>{0.5, 1.0});
  CHECK(c.outcome_spec().hidden == std::vector<int>{8, 8});
  CHECK(c.training_options(4).max_epochs == 3);
  CHECK(config_to_json(validate_config(config_to_json(c))) == config_to_json(c));
}
