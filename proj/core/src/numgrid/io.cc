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

#include "attnfuse/numgrid/io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <system_error>

namespace attnfuse::numgrid {
namespace {

static_assert(std::endian::native == std::endian::little,
              "NGT1 encoding assumes a little-endian host");
static_assert(std::numeric_limits<float>::is_iec559);

void PutU32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

std::uint32_t GetU32(std::string_view bytes, std::size_t at) {
  std::uint32_t v;
  std::memcpy(&v, bytes.data() + at, 4);
  return v;
}

}  // namespace

std::string EncodeNgt(const Tensor& tensor) {
  std::string out;
  out.reserve(kNgtHeaderBytes + tensor.size() * sizeof(float));
  out.append(kNgtMagic);
  PutU32(out, 4);
  const Dims& d = tensor.dims();
  for (int extent : {d.batch, d.channels, d.height, d.width}) {
    PutU32(out, static_cast<std::uint32_t>(extent));
  }
  out.append(reinterpret_cast<const char*>(tensor.data()),
             tensor.size() * sizeof(float));
  return out;
}

Tensor DecodeNgt(std::string_view bytes, std::size_t& offset) {
  const std::size_t start = offset;
  if (bytes.size() < start + kNgtHeaderBytes) {
    throw FormatError("NGT1: truncated header", bytes.size());
  }
  if (bytes.substr(start, 4) != kNgtMagic) {
    throw FormatError("NGT1: bad magic", start);
  }
  const std::uint32_t rank = GetU32(bytes, start + 4);
  if (rank != 4) {
    throw FormatError("NGT1: unsupported rank " + std::to_string(rank), start + 4);
  }
  std::uint32_t extents[4];
  std::uint64_t count = 1;
  for (int i = 0; i < 4; ++i) {
    extents[i] = GetU32(bytes, start + 8 + 4 * i);
    if (extents[i] > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
      throw FormatError("NGT1: extent out of range", start + 8 + 4 * i);
    }
    count *= extents[i];
    if (count > (std::uint64_t{1} << 34)) {
      throw FormatError("NGT1: tensor too large", start + 8 + 4 * i);
    }
  }
  const std::size_t payload = static_cast<std::size_t>(count) * sizeof(float);
  const std::size_t body = start + kNgtHeaderBytes;
  if (bytes.size() - body < payload) {
    throw FormatError("NGT1: truncated payload (need " + std::to_string(payload) +
                          " bytes)",
                      bytes.size());
  }
  std::vector<float> values(static_cast<std::size_t>(count));
  std::memcpy(values.data(), bytes.data() + body, payload);
  offset = body + payload;
  return Tensor(Dims{static_cast<int>(extents[0]), static_cast<int>(extents[1]),
                     static_cast<int>(extents[2]), static_cast<int>(extents[3])},
                std::move(values));
}

Tensor DecodeNgt(std::string_view bytes) {
  std::size_t offset = 0;
  Tensor t = DecodeNgt(bytes, offset);
  if (offset != bytes.size()) {
    throw FormatError("NGT1: trailing bytes after record", offset);
  }
  return t;
}

void WriteNgt(const std::filesystem::path& path, const Tensor& tensor) {
  WriteFileAtomic(path, EncodeNgt(tensor));
}

Tensor ReadNgt(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  try {
    return DecodeNgt(bytes);
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " in " + path.string(), e.offset());
  }
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for reading", path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed", path);
  return bytes;
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory", path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing", tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed", tmp);
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename into place", path);
}

}  // namespace attnfuse::numgrid
