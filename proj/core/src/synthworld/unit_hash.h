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

#ifndef ATTNFUSE_SRC_SYNTHWORLD_UNIT_HASH_H_
#define ATTNFUSE_SRC_SYNTHWORLD_UNIT_HASH_H_

#include <cstdint>
#include <initializer_list>

#include "attnfuse/synthworld/scene.h"

namespace attnfuse::synthworld::internal {

inline std::uint64_t HashKeys(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t k : keys) h = MixSeed(h, k);
  return h;
}

// Uniform in [0, 1) from a key tuple.
inline double HashUniform(std::initializer_list<std::uint64_t> keys) {
  return static_cast<double>(HashKeys(keys) >> 11) * 0x1.0p-53;
}

inline constexpr std::uint64_t kTileKeyBase = 1ULL << 32;

}  // namespace attnfuse::synthworld::internal

#endif  // ATTNFUSE_SRC_SYNTHWORLD_UNIT_HASH_H_
