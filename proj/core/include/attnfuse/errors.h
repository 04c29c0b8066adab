// Copyright 2026 The attnfuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ATTNFUSE_ERRORS_H_
#define ATTNFUSE_ERRORS_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace attnfuse {

// Tensor extents do not fit the operation.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The caller violated an API precondition (bad enum value, wrong task, ...).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A serialized artifact is malformed. `offset` is the byte position at which
// decoding stopped.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) +
                           ")"),
        offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

// Filesystem failure; carries the offending path.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, const std::filesystem::path& path)
      : std::runtime_error(what + ": " + path.string()), path_(path) {}

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// A metric is undefined for the given input (e.g. AP with one class only).
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace attnfuse

#endif  // ATTNFUSE_ERRORS_H_
