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

// Locale-independent text helpers for the CSV/JSON artifacts.

#ifndef CATE_FORMAT_HPP_
#define CATE_FORMAT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace cate {

// Shortest representation that parses back to the same double. Non-finite
// values are written as nan, inf and -inf.
std::string format_double(double value);

// Strict parse of a whole field; throws IngestionError(line) on failure.
double parse_double(std::string_view text, std::size_t line);

std::vector<std::string> split_csv_line(std::string_view line);

// Reads a whole file; throws IngestionError when it cannot be opened.
std::string read_file(const std::string& path);

// Writes `content` to `path` (creating parent directories).
void write_file(const std::string& path, const std::string& content);

}  // namespace cate

#endif  // CATE_FORMAT_HPP_
