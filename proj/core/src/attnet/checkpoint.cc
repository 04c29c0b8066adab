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

#include <bit>
#include <cstring>
#include <string>

#include "attnfuse/attnet/train.h"
#include "attnfuse/errors.h"
#include "attnfuse/numgrid/io.h"
#include "src/common/json_convert.h"

namespace attnfuse::attnet {
namespace {

using internal::Json;

constexpr std::string_view kMagic = "ATFC";
constexpr const char* kFormat = "attnfuse-checkpoint/1";
constexpr std::size_t kPrefixBytes = 8;

static_assert(std::endian::native == std::endian::little);

}  // namespace

std::string EncodeModel(const AttentionModel& model) {
  std::string payload;
  Json table = Json::array();
  for (const auto* p : model.parameters()) {
    const std::string record = numgrid::EncodeNgt(p->value());
    table.push_back({{"name", p->name()},
                     {"dims", internal::ToJson(p->value().dims())},
                     {"offset", payload.size()},
                     {"bytes", record.size()}});
    payload += record;
  }
  const Json header{{"format", kFormat},
                    {"config", internal::ToJson(model.config())},
                    {"parameters", table}};
  const std::string text = header.dump();
  const auto len = static_cast<std::uint32_t>(text.size());
  std::string out(kMagic);
  out.append(reinterpret_cast<const char*>(&len), sizeof(len));
  out += text;
  out += payload;
  return out;
}

void SaveModel(const AttentionModel& model, const std::filesystem::path& path) {
  numgrid::WriteFileAtomic(path, EncodeModel(model));
}

AttentionModel DecodeModel(std::string_view bytes) {
  if (bytes.size() < kPrefixBytes) throw FormatError("checkpoint: truncated prefix", bytes.size());
  if (bytes.substr(0, 4) != kMagic) throw FormatError("checkpoint: bad magic", 0);
  std::uint32_t len;
  std::memcpy(&len, bytes.data() + 4, sizeof(len));
  if (len > bytes.size() - kPrefixBytes) {
    throw FormatError("checkpoint: header length exceeds file size", 4);
  }
  Json header;
  try {
    header = Json::parse(bytes.substr(kPrefixBytes, len));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("checkpoint: bad header: ") + e.what(), kPrefixBytes + e.byte);
  }
  const std::size_t payload_start = kPrefixBytes + len;
  Json table;
  ModelConfig config;
  try {
    if (internal::ReadRequired<std::string>(header, "format") != kFormat) {
      throw UsageError("unsupported format tag");
    }
    config = internal::ModelConfigFromJson(internal::ReadRequired<Json>(header, "config"));
    table = internal::ReadRequired<Json>(header, "parameters");
    if (!table.is_array()) throw UsageError("parameter table must be an array");
  } catch (const UsageError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what(), kPrefixBytes);
  }

  AttentionModel model(config, 0);
  auto params = model.parameters();
  if (table.size() != params.size()) {
    throw FormatError("checkpoint: header lists " + std::to_string(table.size()) +
                          " parameters, config implies " + std::to_string(params.size()),
                      kPrefixBytes);
  }
  std::size_t offset = payload_start;
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::string name;
    numgrid::Dims dims;
    std::size_t rel = 0, size = 0;
    try {
      name = internal::ReadRequired<std::string>(table[i], "name");
      dims = internal::DimsFromJson(internal::ReadRequired<Json>(table[i], "dims"));
      rel = internal::ReadRequired<std::size_t>(table[i], "offset");
      size = internal::ReadRequired<std::size_t>(table[i], "bytes");
    } catch (const UsageError& e) {
      throw FormatError(std::string("checkpoint: parameter table: ") + e.what(), kPrefixBytes);
    }
    if (name != params[i]->name() || dims != params[i]->value().dims()) {
      throw FormatError("checkpoint: parameter '" + name + "' " + dims.ToString() +
                            " does not match the config (expected '" + params[i]->name() +
                            "' " + params[i]->value().dims().ToString() + ")",
                        kPrefixBytes);
    }
    if (payload_start + rel != offset) {
      throw FormatError("checkpoint: parameter '" + name + "' has a bad offset", offset);
    }
    const std::size_t begin = offset;
    numgrid::Tensor value = numgrid::DecodeNgt(bytes, offset);
    if (offset - begin != size || value.dims() != dims) {
      throw FormatError("checkpoint: parameter '" + name + "' payload disagrees with header",
                        begin);
    }
    params[i]->mutable_value() = std::move(value);
  }
  if (offset != bytes.size()) throw FormatError("checkpoint: trailing bytes", offset);
  return model;
}

AttentionModel LoadModel(const std::filesystem::path& path) {
  const std::string bytes = numgrid::ReadFileBytes(path);
  try {
    return DecodeModel(bytes);
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " in " + path.string(), e.offset());
  }
}

}  // namespace attnfuse::attnet
