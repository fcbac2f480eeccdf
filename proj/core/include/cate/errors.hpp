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

#ifndef CATE_ERRORS_HPP_
#define CATE_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cate {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or vector dimensions do not compose.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An operation was called in the wrong state (e.g. backward without forward).
class StateError : public Error {
 public:
  using Error::Error;
};

// A value left the finite range. `index()` identifies the offending element
// (flat parameter index, sample index, ...), or npos when not applicable.
class NumericError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit NumericError(const std::string& what, std::size_t index = npos)
      : Error(what), index_(index) {}

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Argument outside the mathematical domain of an operation (e.g. gamma < 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition (unsorted samples, deferred actions
// passed to a risk computation, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Model fitting could not proceed or diverged.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Malformed or missing input files. `offset()` is the byte offset (binary
// inputs) or line number (text inputs) where ingestion stopped.
class IngestionError : public Error {
 public:
  IngestionError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Invalid configuration; carries every problem found, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace cate

#endif  // CATE_ERRORS_HPP_
