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

#ifndef ATTNFUSE_NUMGRID_IO_H_
#define ATTNFUSE_NUMGRID_IO_H_

// NGT1 tensor files: the 4 bytes "NGT1", a little-endian u32 rank (always 4),
// four little-endian u32 extents, then the float32 values little-endian in
// row-major order.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "attnfuse/numgrid/tensor.h"

namespace attnfuse::numgrid {

inline constexpr std::string_view kNgtMagic = "NGT1";
inline constexpr std::size_t kNgtHeaderBytes = 4 + 4 + 4 * 4;

std::string EncodeNgt(const Tensor& tensor);

// Decodes the NGT1 record starting at `offset` in `bytes`. On success,
// `offset` is advanced past the record. Throws FormatError with the byte
// offset of the first bad field.
Tensor DecodeNgt(std::string_view bytes, std::size_t& offset);

// Decodes a buffer holding exactly one record.
Tensor DecodeNgt(std::string_view bytes);

void WriteNgt(const std::filesystem::path& path, const Tensor& tensor);
Tensor ReadNgt(const std::filesystem::path& path);

// Whole-file helpers shared by every on-disk format in the project.
std::string ReadFileBytes(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace attnfuse::numgrid

#endif  // ATTNFUSE_NUMGRID_IO_H_
