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

#ifndef ATTNFUSE_SRC_COMMON_JSON_CONVERT_H_
#define ATTNFUSE_SRC_COMMON_JSON_CONVERT_H_

#include <string>

#include "json.hpp"

#include "attnfuse/attnet/model.h"
#include "attnfuse/errors.h"
#include "attnfuse/numgrid/tensor.h"
#include "attnfuse/synthworld/profile.h"
#include "attnfuse/synthworld/scene.h"

namespace attnfuse::internal {

// Sorted keys give canonical output.
using Json = nlohmann::json;

// Parsers throw UsageError on missing or ill-typed fields. Fields absent from
// the input keep their defaults.
Json ToJson(const synthworld::SceneSpec& spec);
synthworld::SceneSpec SceneSpecFromJson(const Json& j);
Json ToJson(const synthworld::CorruptionProfile& profile);
synthworld::CorruptionProfile ProfileFromJson(const Json& j);
Json ToJson(const numgrid::Dims& dims);
numgrid::Dims DimsFromJson(const Json& j);
Json ToJson(const attnet::ModelConfig& config);
attnet::ModelConfig ModelConfigFromJson(const Json& j);

// Reads key into out if present, with a UsageError naming the key otherwise
// on type mismatch.
template <typename T>
void ReadOptional(const Json& j, const char* key, T& out) {
  if (!j.is_object()) throw UsageError(std::string("expected an object around '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
T ReadRequired(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw UsageError(std::string("missing field '") + key + "'");
  }
  T out{};
  ReadOptional(j, key, out);
  return out;
}

std::string Dump(const Json& j);

}  // namespace attnfuse::internal

#endif  // ATTNFUSE_SRC_COMMON_JSON_CONVERT_H_
