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

#include <cstdio>
#include <sstream>

#include "cate/errors.hpp"
#include "cate/format.hpp"
#include "cate/mnist.hpp"

namespace cate {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(const std::string& bytes, std::size_t offset, const std::string& source) {
  if (offset + 4 > bytes.size()) {
    throw IngestionError(source + ": truncated header at byte " + std::to_string(offset), offset);
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08x", v);
  return buf;
}

void check_magic(std::uint32_t got, std::uint32_t want, const std::string& source) {
  if (got != want) {
    throw IngestionError(source + ": bad magic " + hex(got) + ", expected " + hex(want), 0);
  }
}

void check_payload(const std::string& bytes, std::size_t header, std::size_t payload,
                   const std::string& source) {
  if (bytes.size() < header + payload) {
    throw IngestionError(source + ": truncated payload, " + std::to_string(bytes.size()) +
                             " bytes present, " + std::to_string(header + payload) + " expected",
                         bytes.size());
  }
}

}  // namespace

IdxImages parse_idx_images(const std::string& bytes, const std::string& source) {
  check_magic(read_be32(bytes, 0, source), kImageMagic, source);
  IdxImages out;
  out.count = read_be32(bytes, 4, source);
  out.rows = read_be32(bytes, 8, source);
  out.cols = read_be32(bytes, 12, source);
  const std::size_t payload = out.count * out.rows * out.cols;
  check_payload(bytes, 16, payload, source);
  out.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(payload));
  return out;
}

std::vector<std::uint8_t> parse_idx_labels(const std::string& bytes, const std::string& source) {
  check_magic(read_be32(bytes, 0, source), kLabelMagic, source);
  const std::size_t count = read_be32(bytes, 4, source);
  check_payload(bytes, 8, count, source);
  std::vector<std::uint8_t> labels(bytes.begin() + 8,
                                   bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 9) {
      throw IngestionError(source + ": label " + std::to_string(labels[i]) + " out of range",
                           8 + i);
    }
  }
  return labels;
}

IdxImages read_idx_images(const std::string& path) { return parse_idx_images(read_file(path), path); }

std::vector<std::uint8_t> read_idx_labels(const std::string& path) {
  return parse_idx_labels(read_file(path), path);
}

MnistSplit load_mnist(const std::string& dir, bool train) {
  const std::string prefix = dir + (train ? "/train" : "/t10k");
  MnistSplit s;
  s.images = read_idx_images(prefix + "-images-idx3-ubyte");
  s.labels = read_idx_labels(prefix + "-labels-idx1-ubyte");
  if (s.labels.size() != s.images.count) {
    throw IngestionError(prefix + ": " + std::to_string(s.images.count) + " images but " +
                             std::to_string(s.labels.size()) + " labels",
                         4);
  }
  return s;
}

}  // namespace cate
