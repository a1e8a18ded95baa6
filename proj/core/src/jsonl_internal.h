// Copyright 2026 The mcqa-probe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MCQA_PROBE_SRC_JSONL_INTERNAL_H_
#define MCQA_PROBE_SRC_JSONL_INTERNAL_H_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mcqa_probe/errors.h"

namespace mcqa_probe::internal {

inline std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

inline std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

inline void CheckWritten(const std::ostream& out,
                         const std::filesystem::path& path) {
  if (!out) throw IoError("write failed: " + path.string());
}

// Calls fn(line_number, parsed_object) for every non-empty line.
template <typename Fn>
void ForEachJsonLine(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_number, e.what());
    }
    if (!value.is_object()) {
      throw ParseError(line_number, "expected a JSON object");
    }
    fn(line_number, value);
  }
  if (in.bad()) throw IoError("read failed");
}

inline const nlohmann::json& RequireField(const nlohmann::json& object,
                                          std::string_view key,
                                          std::size_t line_number) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ParseError(line_number, "missing field \"" + std::string(key) + "\"");
  }
  return *it;
}

inline std::string RequireString(const nlohmann::json& object,
                                 std::string_view key,
                                 std::size_t line_number) {
  const auto& value = RequireField(object, key, line_number);
  if (!value.is_string()) {
    throw ParseError(line_number,
                     "field \"" + std::string(key) + "\" must be a string");
  }
  return value.get<std::string>();
}

inline std::size_t RequireIndex(const nlohmann::json& object,
                                std::string_view key,
                                std::size_t line_number) {
  const auto& value = RequireField(object, key, line_number);
  if (!value.is_number_integer()) {
    throw ParseError(line_number,
                     "field \"" + std::string(key) + "\" must be an integer");
  }
  if (value.is_number_unsigned()) return value.get<std::size_t>();
  const auto signed_value = value.get<long long>();
  if (signed_value < 0) {
    // Negative indices are out of range rather than malformed.
    return static_cast<std::size_t>(-1);
  }
  return static_cast<std::size_t>(signed_value);
}

inline void RejectUnknownKeys(const nlohmann::json& object,
                              std::initializer_list<std::string_view> allowed,
                              std::size_t line_number) {
  for (const auto& [key, unused] : object.items()) {
    bool known = false;
    for (auto name : allowed) known = known || key == name;
    if (!known) throw ParseError(line_number, "unknown field \"" + key + "\"");
  }
}

// Compact dump; invalid UTF-8 surfaces as ValidationError.
inline std::string DumpCompact(const nlohmann::ordered_json& value) {
  try {
    return value.dump();
  } catch (const nlohmann::json::type_error& e) {
    throw ValidationError(std::string("cannot serialize: ") + e.what());
  }
}

}  // namespace mcqa_probe::internal

#endif  // MCQA_PROBE_SRC_JSONL_INTERNAL_H_
