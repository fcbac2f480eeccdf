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

#include "cate/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "cate/errors.hpp"
#include "cate/random.hpp"

namespace cate {
namespace {

using Json = nlohmann::json;

// Collects problems while reading a section.
class Reader {
 public:
  Reader(const Json& doc, std::string path, std::vector<std::string>& problems)
      : doc_(doc), path_(std::move(path)), problems_(problems) {
    if (!doc_.is_object()) problems_.push_back(path_ + ": expected an object");
  }

  void allow(std::initializer_list<const char*> keys) {
    if (!doc_.is_object()) return;
    std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [key, value] : doc_.items()) {
      if (!known.count(key)) problems_.push_back(path_ + ": unknown key '" + key + "'");
    }
  }

  bool has(const char* key) const { return doc_.is_object() && doc_.contains(key); }
  const Json& at(const char* key) const { return doc_.at(key); }
  std::string where(const char* key) const { return path_ + "." + key; }

  void integer(const char* key, int& out, int min) {
    if (!has(key)) return;
    const Json& v = doc_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < min || v.get<long long>() > 1000000000) {
      problems_.push_back(where(key) + ": expected an integer >= " + std::to_string(min));
      return;
    }
    out = v.get<int>();
  }

  void number(const char* key, double& out, double lo, double hi, bool hi_open) {
    if (!has(key)) return;
    const Json& v = doc_.at(key);
    if (!v.is_number()) {
      problems_.push_back(where(key) + ": expected a number");
      return;
    }
    const double x = v.get<double>();
    if (!(x >= lo) || (hi_open ? !(x < hi) : !(x <= hi))) {
      problems_.push_back(where(key) + ": " + std::to_string(x) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + (hi_open ? ")" : "]"));
      return;
    }
    out = x;
  }

  void string(const char* key, std::string& out) {
    if (!has(key)) return;
    if (!doc_.at(key).is_string()) {
      problems_.push_back(where(key) + ": expected a string");
      return;
    }
    out = doc_.at(key).get<std::string>();
  }

  void boolean(const char* key, bool& out) {
    if (!has(key)) return;
    if (!doc_.at(key).is_boolean()) {
      problems_.push_back(where(key) + ": expected true or false");
      return;
    }
    out = doc_.at(key).get<bool>();
  }

  void widths(const char* key, std::vector<int>& out, bool allow_empty) {
    if (!has(key)) return;
    const Json& v = doc_.at(key);
    std::vector<int> w;
    bool ok = v.is_array() && (allow_empty || !v.empty());
    if (ok) {
      for (const auto& e : v) {
        if (!e.is_number_integer() || e.get<long long>() < 1 || e.get<long long>() > 100000) {
          ok = false;
          break;
        }
        w.push_back(e.get<int>());
      }
    }
    if (!ok) {
      problems_.push_back(where(key) + ": expected a list of positive layer widths");
      return;
    }
    out = w;
  }

  // A number or a list of numbers.
  bool numbers(const char* key, std::vector<double>& out) {
    if (!has(key)) return false;
    const Json& v = doc_.at(key);
    std::vector<double> xs;
    if (v.is_number()) {
      xs.push_back(v.get<double>());
    } else if (v.is_array() && !v.empty()) {
      for (const auto& e : v) {
        if (!e.is_number()) {
          problems_.push_back(where(key) + ": expected numbers");
          return false;
        }
        xs.push_back(e.get<double>());
      }
    } else {
      problems_.push_back(where(key) + ": expected a number or a non-empty list of numbers");
      return false;
    }
    out = xs;
    return true;
  }

  std::vector<std::string>& problems() { return problems_; }

 private:
  const Json& doc_;
  std::string path_;
  std::vector<std::string>& problems_;
};

const Json& section(const Json& doc, const char* key) {
  static const Json empty = Json::object();
  return doc.is_object() && doc.contains(key) ? doc.at(key) : empty;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  return out;
}

void apply_kind_defaults(ExperimentConfig& c) {
  switch (c.dataset.kind) {
    case DatasetKind::kSimulated:
      break;
    case DatasetKind::kHcmnist:
      c.dataset.n_train = 5000;
      c.dataset.n_valid = 1000;
      c.dataset.n_test = 1000;
      c.model.encoder_hidden = {200, 200, 200};
      c.model.hidden = {200, 200};
      if (const char* env = std::getenv("CATE_MNIST_DIR")) c.dataset.mnist_dir = env;
      break;
    case DatasetKind::kIhdp:
      c.dataset.n_train = 470;
      c.dataset.n_valid = 202;
      c.dataset.n_test = 75;
      c.dataset.log_gamma_stars = {0.0};
      c.model.encoder_hidden = {200, 200, 200};
      c.model.hidden = {200, 200};
      c.model.dropout_rate = 0.5;
      c.model.batch_size = 100;
      c.sensitivity.log_gammas = linspace(0.0, 4.0, 17);
      c.sensitivity.deferral.enabled = true;
      break;
  }
  c.sensitivity.deferral.multipliers = linspace(0.0, 2.0, 9);
}

void check_increasing(const std::vector<double>& xs, const std::string& what,
                      std::vector<std::string>& problems) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) {
      problems.push_back(what + ": values must be strictly increasing");
      return;
    }
  }
}

}  // namespace

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kSimulated:
      return "simulated";
    case DatasetKind::kHcmnist:
      return "hcmnist";
    case DatasetKind::kIhdp:
      return "ihdp";
  }
  return "unknown";
}

OutcomeModelSpec ExperimentConfig::outcome_spec() const {
  OutcomeModelSpec s;
  s.encoder_hidden = model.encoder_hidden;
  s.hidden = model.hidden;
  s.components = model.components;
  s.dropout_rate = model.dropout_rate;
  return s;
}

PropensitySpec ExperimentConfig::propensity_spec() const {
  PropensitySpec s;
  s.hidden = model.encoder_hidden;
  s.hidden.insert(s.hidden.end(), model.hidden.begin(), model.hidden.end());
  s.dropout_rate = model.dropout_rate;
  return s;
}

TrainingOptions ExperimentConfig::training_options(std::uint64_t seed) const {
  TrainingOptions o;
  o.batch_size = model.batch_size;
  o.patience = model.patience;
  o.max_epochs = model.max_epochs;
  o.learning_rate = model.learning_rate;
  o.seed = seed;
  return o;
}

std::vector<double> ExperimentConfig::gammas() const {
  std::vector<double> g;
  for (double lg : sensitivity.log_gammas) g.push_back(lg == 0.0 ? 1.0 : std::exp(lg));
  return g;
}

ExperimentConfig validate_config(const std::string& json_text) {
  Json doc;
  try {
    doc = json_text.empty() ? Json::object() : Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError({std::string("not valid JSON: ") + e.what()});
  }
  std::vector<std::string> problems;
  ExperimentConfig c;
  Reader top(doc, "config", problems);
  top.allow({"dataset", "model", "sensitivity", "seeds", "num_seeds", "output_dir", "workers"});
  if (!problems.empty()) throw ConfigError(problems);

  Reader ds(section(doc, "dataset"), "dataset", problems);
  ds.allow({"kind", "n_train", "n_valid", "n_test", "log_gamma_star", "mnist_dir", "ihdp_csv"});
  if (ds.has("kind")) {
    const Json& k = ds.at("kind");
    const std::string kind = k.is_string() ? k.get<std::string>() : "";
    if (kind == "simulated") {
      c.dataset.kind = DatasetKind::kSimulated;
    } else if (kind == "hcmnist") {
      c.dataset.kind = DatasetKind::kHcmnist;
    } else if (kind == "ihdp") {
      c.dataset.kind = DatasetKind::kIhdp;
    } else {
      problems.push_back("dataset.kind: expected one of simulated, hcmnist, ihdp");
    }
  }
  apply_kind_defaults(c);
  const bool ihdp = c.dataset.kind == DatasetKind::kIhdp;
  if (ihdp) {
    for (const char* key : {"n_train", "n_valid", "n_test", "log_gamma_star"}) {
      if (ds.has(key)) problems.push_back(std::string("dataset.") + key + ": fixed for ihdp");
    }
  }
  ds.integer("n_train", c.dataset.n_train, 2);
  ds.integer("n_valid", c.dataset.n_valid, 0);
  ds.integer("n_test", c.dataset.n_test, 1);
  if (ds.numbers("log_gamma_star", c.dataset.log_gamma_stars)) {
    for (double v : c.dataset.log_gamma_stars) {
      if (!(v >= 0.0) || !std::isfinite(v)) problems.push_back("dataset.log_gamma_star: values must be >= 0");
    }
  }
  ds.string("mnist_dir", c.dataset.mnist_dir);
  ds.string("ihdp_csv", c.dataset.ihdp_csv);
  if (c.dataset.kind == DatasetKind::kHcmnist) {
    if (c.dataset.mnist_dir.empty()) {
      problems.push_back("dataset.mnist_dir: required for hcmnist (or set CATE_MNIST_DIR)");
    } else if (!std::filesystem::exists(c.dataset.mnist_dir + "/train-images-idx3-ubyte")) {
      problems.push_back("dataset.mnist_dir: no MNIST IDX files under '" + c.dataset.mnist_dir + "'");
    }
  }
  if (!c.dataset.ihdp_csv.empty() && !std::filesystem::exists(c.dataset.ihdp_csv)) {
    problems.push_back("dataset.ihdp_csv: file '" + c.dataset.ihdp_csv + "' does not exist");
  }

  Reader md(section(doc, "model"), "model", problems);
  md.allow({"encoder_hidden", "hidden", "components", "dropout_rate", "batch_size", "patience",
            "max_epochs", "learning_rate"});
  md.widths("encoder_hidden", c.model.encoder_hidden, true);
  md.widths("hidden", c.model.hidden, false);
  md.integer("components", c.model.components, 1);
  md.number("dropout_rate", c.model.dropout_rate, 0.0, 1.0, true);
  md.integer("batch_size", c.model.batch_size, 1);
  md.integer("patience", c.model.patience, 1);
  md.integer("max_epochs", c.model.max_epochs, 1);
  md.number("learning_rate", c.model.learning_rate, 1e-12, 10.0, false);

  Reader sn(section(doc, "sensitivity"), "sensitivity", problems);
  sn.allow({"gammas", "log_gammas", "num_param_samples", "num_outcome_samples", "multiplier",
            "deferral"});
  if (sn.has("gammas") && sn.has("log_gammas")) {
    problems.push_back("sensitivity: give either gammas or log_gammas, not both");
  } else if (sn.has("gammas")) {
    std::vector<double> g;
    if (sn.numbers("gammas", g)) {
      std::vector<double> lg;
      for (double v : g) {
        if (!(v >= 1.0) || !std::isfinite(v)) {
          problems.push_back("sensitivity.gammas: " + std::to_string(v) + " is below 1");
        } else {
          lg.push_back(std::log(v));
        }
      }
      if (lg.size() == g.size()) c.sensitivity.log_gammas = lg;
    }
  } else if (sn.numbers("log_gammas", c.sensitivity.log_gammas)) {
    for (double v : c.sensitivity.log_gammas) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        problems.push_back("sensitivity.log_gammas: " + std::to_string(v) + " is below 0");
      }
    }
  }
  check_increasing(c.sensitivity.log_gammas, "sensitivity gamma grid", problems);
  sn.integer("num_param_samples", c.sensitivity.num_param_samples, 1);
  sn.integer("num_outcome_samples", c.sensitivity.num_outcome_samples, 2);
  sn.number("multiplier", c.sensitivity.multiplier, 0.0, 100.0, false);
  if (sn.has("deferral")) {
    Reader df(sn.at("deferral"), "sensitivity.deferral", problems);
    df.allow({"enabled", "multipliers"});
    df.boolean("enabled", c.sensitivity.deferral.enabled);
    if (df.numbers("multipliers", c.sensitivity.deferral.multipliers)) {
      for (double v : c.sensitivity.deferral.multipliers) {
        if (!(v >= 0.0)) problems.push_back("sensitivity.deferral.multipliers: values must be >= 0");
      }
      check_increasing(c.sensitivity.deferral.multipliers, "sensitivity.deferral.multipliers",
                       problems);
    }
  }
  if (c.sensitivity.deferral.enabled &&
      (c.sensitivity.log_gammas.empty() || c.sensitivity.log_gammas.front() != 0.0)) {
    problems.push_back("sensitivity: deferral sweeps need log gamma 0 as the first grid value");
  }

  if (top.has("seeds") && top.has("num_seeds")) {
    problems.push_back("config: give either seeds or num_seeds, not both");
  } else if (top.has("seeds")) {
    const Json& s = top.at("seeds");
    std::vector<std::uint64_t> seeds;
    bool ok = s.is_array() && !s.empty();
    if (ok) {
      for (const auto& e : s) {
        if (!e.is_number_unsigned()) {
          ok = false;
          break;
        }
        seeds.push_back(e.get<std::uint64_t>());
      }
    }
    if (ok) {
      std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
      if (unique.size() != seeds.size()) problems.push_back("seeds: duplicates are not allowed");
      c.seeds = seeds;
    } else {
      problems.push_back("seeds: expected a non-empty list of non-negative integers");
    }
  } else if (top.has("num_seeds")) {
    int n = 1;
    top.integer("num_seeds", n, 1);
    c.seeds.clear();
    for (int i = 0; i < n; ++i) c.seeds.push_back(static_cast<std::uint64_t>(i));
  }
  top.string("output_dir", c.output_dir);
  if (c.output_dir.empty()) problems.push_back("output_dir: must not be empty");
  top.integer("workers", c.workers, 1);

  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json doc;
  doc["dataset"]["kind"] = to_string(c.dataset.kind);
  if (c.dataset.kind != DatasetKind::kIhdp) {
    doc["dataset"]["n_train"] = c.dataset.n_train;
    doc["dataset"]["n_valid"] = c.dataset.n_valid;
    doc["dataset"]["n_test"] = c.dataset.n_test;
    doc["dataset"]["log_gamma_star"] = c.dataset.log_gamma_stars;
  }
  doc["dataset"]["mnist_dir"] = c.dataset.mnist_dir;
  doc["dataset"]["ihdp_csv"] = c.dataset.ihdp_csv;
  doc["model"]["encoder_hidden"] = c.model.encoder_hidden;
  doc["model"]["hidden"] = c.model.hidden;
  doc["model"]["components"] = c.model.components;
  doc["model"]["dropout_rate"] = c.model.dropout_rate;
  doc["model"]["batch_size"] = c.model.batch_size;
  doc["model"]["patience"] = c.model.patience;
  doc["model"]["max_epochs"] = c.model.max_epochs;
  doc["model"]["learning_rate"] = c.model.learning_rate;
  doc["sensitivity"]["log_gammas"] = c.sensitivity.log_gammas;
  doc["sensitivity"]["num_param_samples"] = c.sensitivity.num_param_samples;
  doc["sensitivity"]["num_outcome_samples"] = c.sensitivity.num_outcome_samples;
  doc["sensitivity"]["multiplier"] = c.sensitivity.multiplier;
  doc["sensitivity"]["deferral"]["enabled"] = c.sensitivity.deferral.enabled;
  doc["sensitivity"]["deferral"]["multipliers"] = c.sensitivity.deferral.multipliers;
  doc["seeds"] = c.seeds;
  doc["output_dir"] = c.output_dir;
  doc["workers"] = c.workers;
  return doc.dump(2);
}

}  // namespace cate
