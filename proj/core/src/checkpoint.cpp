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

#include <utility>
#include <vector>

#include "cate/errors.hpp"
#include "json_io.hpp"

namespace cate::detail {

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestionError(what + ": " + e.what(), e.byte);
  }
}

const Json& require(const Json& doc, const char* key, const std::string& what) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw IngestionError(what + ": missing field '" + key + "'", 0);
  }
  return doc.at(key);
}

Json network_to_json(const nn::DenseNetwork& net) {
  Json layers = Json::array();
  for (const auto& l : net.layers()) {
    // Weights are stored column-major, matching the in-memory layout.
    std::vector<double> w(l.weight.data(), l.weight.data() + l.weight.size());
    std::vector<double> b(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back({{"in", l.in_dim()},
                      {"out", l.out_dim()},
                      {"activation", nn::to_string(l.activation)},
                      {"dropout", l.dropout},
                      {"weight", std::move(w)},
                      {"bias", std::move(b)}});
  }
  return {{"format", "cate.dense_network"},
          {"version", 1},
          {"dropout_rate", net.dropout_rate()},
          {"seed", net.seed()},
          {"layers", std::move(layers)}};
}

nn::DenseNetwork network_from_json(const Json& doc) {
  const std::string what = "network checkpoint";
  try {
    if (require(doc, "format", what).get<std::string>() != "cate.dense_network") {
      throw IngestionError(what + ": unexpected format tag", 0);
    }
    std::vector<nn::DenseLayer> layers;
    for (const auto& jl : require(doc, "layers", what)) {
      const auto in = require(jl, "in", what).get<Eigen::Index>();
      const auto out = require(jl, "out", what).get<Eigen::Index>();
      const auto w = require(jl, "weight", what).get<std::vector<double>>();
      const auto b = require(jl, "bias", what).get<std::vector<double>>();
      if (in <= 0 || out <= 0 || static_cast<Eigen::Index>(w.size()) != in * out ||
          static_cast<Eigen::Index>(b.size()) != out) {
        throw ShapeError(what + ": layer " + std::to_string(layers.size()) +
                         " parameter count does not match its dimensions");
      }
      nn::DenseLayer l;
      l.weight = Eigen::Map<const nn::Matrix>(w.data(), out, in);
      l.bias = Eigen::Map<const nn::Vector>(b.data(), out);
      l.activation = nn::activation_from_string(require(jl, "activation", what).get<std::string>());
      l.dropout = require(jl, "dropout", what).get<bool>();
      layers.push_back(std::move(l));
    }
    return nn::DenseNetwork(std::move(layers), require(doc, "dropout_rate", what).get<double>(),
                            require(doc, "seed", what).get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError(what + ": " + e.what(), 0);
  }
}

}  // namespace cate::detail

namespace cate::nn {

std::string to_checkpoint(const DenseNetwork& net) {
  return detail::network_to_json(net).dump();
}

DenseNetwork network_from_checkpoint(const std::string& text) {
  return detail::network_from_json(detail::parse_json(text, "network checkpoint"));
}

}  // namespace cate::nn
