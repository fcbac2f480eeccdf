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

#include "cate/interval_table.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "cate/errors.hpp"
#include "cate/format.hpp"

namespace cate {

std::vector<CateInterval> IntervalTable::predictive(std::size_t g, double multiplier) const {
  std::vector<CateInterval> out(static_cast<std::size_t>(num_points));
  for (Eigen::Index x = 0; x < num_points; ++x) out[static_cast<std::size_t>(x)] = at(x, g).predictive(multiplier);
  return out;
}

TableResult compute_interval_table(const FittedModels& models, const Eigen::MatrixXd& x,
                                   const std::vector<double>& gammas,
                                   const TableOptions& options) {
  if (gammas.empty()) throw DomainError("gamma grid is empty");
  for (double g : gammas) {
    if (!(g >= 1.0)) throw DomainError("gamma values must be >= 1");
  }
  if (options.num_param_samples < 1) throw DomainError("num_param_samples must be >= 1");
  if (options.num_outcome_samples < 2) throw DomainError("num_outcome_samples must be >= 2");
  const auto W = static_cast<std::size_t>(options.num_param_samples);
  const auto G = gammas.size();
  const auto N = static_cast<std::size_t>(x.cols());
  const auto m = static_cast<std::size_t>(options.num_outcome_samples);

  std::vector<std::vector<OmegaBounds>> per_omega(W, std::vector<OmegaBounds>(N * G));
  auto run_omega = [&](std::size_t w) {
    const OmegaMasks masks = sample_omega(models, options.seed, w);
    const auto draws = draw_omega(models, x, masks, m, options.seed, w, 0);
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t g = 0; g < G; ++g) per_omega[w][i * G + g] = bounds_from_draw(draws[i], gammas[g]);
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, options.workers));
  if (workers == 1 || W == 1) {
    for (std::size_t w = 0; w < W; ++w) run_omega(w);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < std::min(workers, W); ++k) {
      pool.emplace_back([&] {
        for (std::size_t w = next++; w < W; w = next++) {
          try {
            run_omega(w);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  TableResult result;
  result.table.gammas = gammas;
  result.table.num_points = x.cols();
  result.table.stats.resize(N * G);
  std::vector<OmegaBounds> column(W);
  for (std::size_t c = 0; c < N * G; ++c) {
    for (std::size_t w = 0; w < W; ++w) column[w] = per_omega[w][c];
    result.table.stats[c] = aggregate(column);
  }
  if (options.keep_per_omega) result.per_omega = std::move(per_omega);
  return result;
}

std::string interval_rows_csv(const IntervalTable& table, const std::string& prefix,
                              double multiplier) {
  std::ostringstream out;
  for (Eigen::Index x = 0; x < table.num_points; ++x) {
    for (std::size_t g = 0; g < table.gammas.size(); ++g) {
      const IntervalStats& s = table.at(x, g);
      const CateInterval p = s.predictive(multiplier);
      out << prefix << x << ',' << format_double(table.gammas[g]) << ','
          << format_double(s.lower_mean) << ',' << format_double(s.upper_mean) << ','
          << format_double(s.lower_var) << ',' << format_double(s.upper_var) << ','
          << format_double(p.lower) << ',' << format_double(p.upper) << '\n';
    }
  }
  return out.str();
}

IntervalTable parse_interval_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kIntervalColumns) {
    throw IngestionError("interval table: header must be " + std::string(kIntervalColumns), 1);
  }
  IntervalTable table;
  Eigen::Index last_x = -1;
  std::size_t g = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 8) throw IngestionError("interval table: expected 8 columns", line_no);
    double v[8];
    for (std::size_t i = 0; i < 8; ++i) v[i] = parse_double(cells[i], line_no);
    const auto x = static_cast<Eigen::Index>(v[0]);
    if (x != last_x) {
      if (x != last_x + 1) throw IngestionError("interval table: x_index out of order", line_no);
      if (last_x >= 0 && g != table.gammas.size()) {
        throw IngestionError("interval table: ragged gamma grid", line_no);
      }
      last_x = x;
      g = 0;
    }
    if (x == 0) {
      table.gammas.push_back(v[1]);
    } else if (g >= table.gammas.size() || table.gammas[g] != v[1]) {
      throw IngestionError("interval table: gamma grid differs between points", line_no);
    }
    IntervalStats s;
    s.lower_mean = v[2];
    s.upper_mean = v[3];
    s.lower_var = v[4];
    s.upper_var = v[5];
    table.stats.push_back(s);
    ++g;
  }
  if (last_x < 0) throw IngestionError("interval table: no rows", line_no);
  if (g != table.gammas.size()) throw IngestionError("interval table: ragged gamma grid", line_no);
  table.num_points = last_x + 1;
  return table;
}

}  // namespace cate
