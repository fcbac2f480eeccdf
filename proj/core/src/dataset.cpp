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

#include "cate/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cate/errors.hpp"
#include "cate/format.hpp"
#include "cate/random.hpp"

namespace cate {
namespace {

template <typename V>
V take_rows(const V& v, const std::vector<Eigen::Index>& rows) {
  if (v.size() == 0) return v;
  V out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
  return out;
}

Eigen::MatrixXd take_matrix_rows(const Eigen::MatrixXd& m,
                                 const std::vector<Eigen::Index>& rows) {
  if (m.size() == 0) return m;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

}  // namespace

std::string to_string(Split split) {
  switch (split) {
    case Split::kAll:
      return "all";
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kTest:
      return "test";
  }
  return "unknown";
}

void Dataset::validate() const {
  const Eigen::Index n = treatments.size();
  if (covariates.cols() != n || outcomes.size() != n) {
    throw ShapeError("dataset columns disagree: " + std::to_string(covariates.cols()) +
                     " covariate columns, " + std::to_string(n) + " treatments, " +
                     std::to_string(outcomes.size()) + " outcomes");
  }
  auto check_len = [&](Eigen::Index len, const char* what) {
    if (len != 0 && len != n) {
      throw ShapeError(std::string("dataset field '") + what + "' has length " +
                       std::to_string(len) + ", expected " + std::to_string(n));
    }
  };
  check_len(hidden_confounder.size(), "hidden_confounder");
  check_len(true_cate.size(), "true_cate");
  check_len(latent.size(), "latent");
  check_len(potential_outcomes.rows(), "potential_outcomes");
  check_len(expected_outcomes.rows(), "expected_outcomes");
  if (potential_outcomes.size() > 0 && potential_outcomes.cols() != 2) {
    throw ShapeError("potential_outcomes must have two columns");
  }
  if (expected_outcomes.size() > 0 && expected_outcomes.cols() != 2) {
    throw ShapeError("expected_outcomes must have two columns");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (treatments[i] != 0.0 && treatments[i] != 1.0) {
      throw DomainError("treatment of row " + std::to_string(i) + " is not binary");
    }
    if (has_potential_outcomes() &&
        potential_outcomes(i, static_cast<Eigen::Index>(treatments[i])) != outcomes[i]) {
      throw DomainError("row " + std::to_string(i) +
                        ": observed outcome differs from the assigned potential outcome");
    }
  }
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows, Split tag) const {
  Dataset out;
  out.covariates.resize(covariates.rows(), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= size()) throw ShapeError("subset row out of range");
    out.covariates.col(static_cast<Eigen::Index>(i)) = covariates.col(rows[i]);
  }
  out.treatments = take_rows(treatments, rows);
  out.outcomes = take_rows(outcomes, rows);
  out.hidden_confounder = take_rows(hidden_confounder, rows);
  out.true_cate = take_rows(true_cate, rows);
  out.latent = take_rows(latent, rows);
  out.potential_outcomes = take_matrix_rows(potential_outcomes, rows);
  out.expected_outcomes = take_matrix_rows(expected_outcomes, rows);
  out.split = tag;
  out.seed = seed;
  out.name = name;
  out.gamma_star = gamma_star;
  return out;
}

DatasetSplits split_sizes(const Dataset& data, Eigen::Index n_train, Eigen::Index n_valid,
                          Eigen::Index n_test, std::uint64_t seed) {
  const Eigen::Index n = data.size();
  if (n_train < 0 || n_valid < 0 || n_test < 0 || n_train + n_valid + n_test != n) {
    throw ConfigError({"split sizes " + std::to_string(n_train) + "/" +
                       std::to_string(n_valid) + "/" + std::to_string(n_test) +
                       " do not partition " + std::to_string(n) + " rows"});
  }
  Rng rng = make_rng(seed, Stream::kSplit);
  const auto perm = random_permutation(static_cast<std::size_t>(n), rng);
  // perm[0, valid) -> valid, perm[valid, valid + test) -> test, rest -> train.
  std::vector<int> part(static_cast<std::size_t>(n), 0);
  for (Eigen::Index k = 0; k < n_valid; ++k) part[perm[static_cast<std::size_t>(k)]] = 1;
  for (Eigen::Index k = n_valid; k < n_valid + n_test; ++k) {
    part[perm[static_cast<std::size_t>(k)]] = 2;
  }
  std::vector<Eigen::Index> rows[3];
  for (Eigen::Index i = 0; i < n; ++i) rows[part[static_cast<std::size_t>(i)]].push_back(i);
  return {data.subset(rows[0], Split::kTrain), data.subset(rows[1], Split::kValid),
          data.subset(rows[2], Split::kTest)};
}

DatasetSplits split(const Dataset& data, const SplitFractions& f, std::uint64_t seed) {
  std::vector<std::string> problems;
  if (f.train < 0 || f.valid < 0 || f.test < 0) problems.push_back("split fractions must be non-negative");
  if (std::abs(f.train + f.valid + f.test - 1.0) > 1e-9) {
    problems.push_back("split fractions must sum to 1");
  }
  if (!problems.empty()) throw ConfigError(problems);
  const Eigen::Index n = data.size();
  const auto n_valid = static_cast<Eigen::Index>(std::floor(f.valid * static_cast<double>(n) + 1e-9));
  const auto n_test = static_cast<Eigen::Index>(std::floor(f.test * static_cast<double>(n) + 1e-9));
  const Eigen::Index n_train = n - n_valid - n_test;
  if (f.train > 0 && n_train == 0) problems.push_back("train split is empty");
  if (f.valid > 0 && n_valid == 0) problems.push_back("valid split is empty");
  if (f.test > 0 && n_test == 0) problems.push_back("test split is empty");
  if (!problems.empty()) throw ConfigError(problems);
  return split_sizes(data, n_train, n_valid, n_test, seed);
}

Dataset concatenate(const std::vector<const Dataset*>& parts, Split tag) {
  if (parts.empty()) throw ShapeError("nothing to concatenate");
  Eigen::Index n = 0;
  for (const auto* p : parts) {
    if (p->dim() != parts.front()->dim()) throw ShapeError("datasets differ in dimension");
    n += p->size();
  }
  Dataset out = parts.front()->subset({}, tag);
  auto cat_vec = [&](auto member) {
    Eigen::VectorXd v;
    if ((parts.front()->*member).size() == 0) return v;
    v.resize(n);
    Eigen::Index pos = 0;
    for (const auto* p : parts) {
      v.segment(pos, p->size()) = p->*member;
      pos += p->size();
    }
    return v;
  };
  auto cat_mat = [&](auto member) {
    Eigen::MatrixXd m;
    if ((parts.front()->*member).size() == 0) return m;
    m.resize(n, 2);
    Eigen::Index pos = 0;
    for (const auto* p : parts) {
      m.middleRows(pos, p->size()) = p->*member;
      pos += p->size();
    }
    return m;
  };
  out.covariates.resize(parts.front()->dim(), n);
  Eigen::Index pos = 0;
  for (const auto* p : parts) {
    out.covariates.middleCols(pos, p->size()) = p->covariates;
    pos += p->size();
  }
  out.treatments = cat_vec(&Dataset::treatments);
  out.outcomes = cat_vec(&Dataset::outcomes);
  out.hidden_confounder = cat_vec(&Dataset::hidden_confounder);
  out.true_cate = cat_vec(&Dataset::true_cate);
  out.latent = cat_vec(&Dataset::latent);
  out.potential_outcomes = cat_mat(&Dataset::potential_outcomes);
  out.expected_outcomes = cat_mat(&Dataset::expected_outcomes);
  return out;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  data.validate();
  std::ostringstream out;
  out << "t,y";
  for (Eigen::Index j = 0; j < data.dim(); ++j) out << ",x" << j;
  const bool u = data.has_hidden_confounder();
  const bool po = data.has_potential_outcomes();
  const bool eo = data.expected_outcomes.size() > 0;
  const bool tc = data.has_true_cate();
  const bool lt = data.latent.size() > 0;
  if (u) out << ",u";
  if (po) out << ",y0,y1";
  if (eo) out << ",mu0,mu1";
  if (tc) out << ",cate";
  if (lt) out << ",latent";
  out << "\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out << format_double(data.treatments[i]) << ',' << format_double(data.outcomes[i]);
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << ',' << format_double(data.covariates(j, i));
    if (u) out << ',' << format_double(data.hidden_confounder[i]);
    if (po) {
      out << ',' << format_double(data.potential_outcomes(i, 0)) << ','
          << format_double(data.potential_outcomes(i, 1));
    }
    if (eo) {
      out << ',' << format_double(data.expected_outcomes(i, 0)) << ','
          << format_double(data.expected_outcomes(i, 1));
    }
    if (tc) out << ',' << format_double(data.true_cate[i]);
    if (lt) out << ',' << format_double(data.latent[i]);
    out << "\n";
  }
  write_file(path, out.str());
}

Dataset read_dataset_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IngestionError(path + ": empty file", 1);
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < header.size(); ++k) col[header[k]] = k;
  std::vector<std::string> missing;
  for (const char* need : {"t", "y"}) {
    if (!col.count(need)) missing.emplace_back(need);
  }
  std::vector<std::size_t> xcols;
  for (std::size_t j = 0;; ++j) {
    auto it = col.find("x" + std::to_string(j));
    if (it == col.end()) break;
    xcols.push_back(it->second);
  }
  if (xcols.empty()) missing.emplace_back("x0");
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw IngestionError(path + ": missing columns: " + list, 1);
  }
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw IngestionError(path + ": line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(header.size()),
                           line_no);
    }
    std::vector<double> r(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) r[k] = parse_double(fields[k], line_no);
    rows.push_back(std::move(r));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Dataset d;
  d.covariates.resize(static_cast<Eigen::Index>(xcols.size()), n);
  d.treatments.resize(n);
  d.outcomes.resize(n);
  auto opt_vec = [&](const char* name, Eigen::VectorXd& v) {
    auto it = col.find(name);
    if (it == col.end()) return;
    v.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rows[static_cast<std::size_t>(i)][it->second];
  };
  auto opt_pair = [&](const char* a, const char* b, Eigen::MatrixXd& m) {
    auto ia = col.find(a);
    auto ib = col.find(b);
    if (ia == col.end() || ib == col.end()) return;
    m.resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, 0) = rows[static_cast<std::size_t>(i)][ia->second];
      m(i, 1) = rows[static_cast<std::size_t>(i)][ib->second];
    }
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    d.treatments[i] = r[col["t"]];
    d.outcomes[i] = r[col["y"]];
    for (std::size_t j = 0; j < xcols.size(); ++j) d.covariates(static_cast<Eigen::Index>(j), i) = r[xcols[j]];
  }
  opt_vec("u", d.hidden_confounder);
  opt_vec("cate", d.true_cate);
  opt_vec("latent", d.latent);
  opt_pair("y0", "y1", d.potential_outcomes);
  opt_pair("mu0", "mu1", d.expected_outcomes);
  d.validate();

  const std::filesystem::path sidecar = std::filesystem::path(path).replace_extension(".json");
  if (std::filesystem::exists(sidecar)) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(sidecar.string()));
      d.name = doc.value("generator", std::string());
      d.seed = doc.value("seed", std::uint64_t{0});
      d.gamma_star = doc.value("gamma_star", 1.0);
    } catch (const nlohmann::json::exception& e) {
      throw IngestionError(sidecar.string() + ": " + e.what(), 0);
    }
  }
  return d;
}

void write_dataset_sidecar(const Dataset& data, const std::string& path) {
  nlohmann::ordered_json doc;
  doc["generator"] = data.name;
  doc["generator_version"] = kGeneratorVersion;
  doc["seed"] = data.seed;
  doc["gamma_star"] = data.gamma_star;
  doc["split"] = to_string(data.split);
  doc["rows"] = data.size();
  doc["covariates"] = data.dim();
  write_file(path, doc.dump(2) + "\n");
}

}  // namespace cate
