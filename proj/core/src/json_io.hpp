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

// Internal JSON helpers shared by the checkpoint writers. Not installed.

#ifndef CATE_SRC_JSON_IO_HPP_
#define CATE_SRC_JSON_IO_HPP_

#include <string>

#include <json.hpp>

#include "cate/nn.hpp"

namespace cate::detail {

using Json = nlohmann::json;

Json network_to_json(const nn::DenseNetwork& net);
nn::DenseNetwork network_from_json(const Json& doc);

// Parses text and maps parse failures to IngestionError.
Json parse_json(const std::string& text, const std::string& what);

// Typed field access with descriptive IngestionError on absence/mismatch.
const Json& require(const Json& doc, const char* key, const std::string& what);

}  // namespace cate::detail

#endif  // CATE_SRC_JSON_IO_HPP_
