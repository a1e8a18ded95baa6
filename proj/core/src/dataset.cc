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

#include "mcqa_probe/dataset.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "jsonl_internal.h"
#include "mcqa_probe/errors.h"

namespace mcqa_probe {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

McqaInstance InstanceFromJson(const json& object, std::size_t line_number) {
  internal::RejectUnknownKeys(object, {"id", "question", "options", "gold"},
                              line_number);
  McqaInstance instance;
  instance.id = internal::RequireString(object, "id", line_number);
  instance.question = internal::RequireString(object, "question", line_number);
  const auto& options = internal::RequireField(object, "options", line_number);
  if (!options.is_array()) {
    throw ParseError(line_number, "field \"options\" must be an array");
  }
  instance.options.reserve(options.size());
  for (const auto& option : options) {
    if (!option.is_object()) {
      throw ParseError(line_number, "each option must be an object");
    }
    internal::RejectUnknownKeys(option, {"text", "context"}, line_number);
    instance.options.push_back(
        {internal::RequireString(option, "text", line_number),
         internal::RequireString(option, "context", line_number)});
  }
  instance.gold = internal::RequireIndex(object, "gold", line_number);
  return instance;
}

bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

bool SameInstances(const Dataset& a, const Dataset& b) {
  return a.instances == b.instances;
}

void ValidateInstance(const McqaInstance& instance) {
  const std::size_t k = instance.num_options();
  if (k < kMinOptions || k > kMaxOptions) {
    throw ValidationError("instance \"" + instance.id + "\": option count " +
                          std::to_string(k) + " outside [2, 26]");
  }
  if (instance.gold >= k) {
    throw ValidationError("instance \"" + instance.id + "\": gold index " +
                          (instance.gold == static_cast<std::size_t>(-1)
                               ? std::string("(negative)")
                               : std::to_string(instance.gold)) +
                          " out of range for " + std::to_string(k) +
                          " options");
  }
}

Dataset ReadDataset(std::istream& in, std::string source_name) {
  Dataset dataset;
  dataset.source_path = std::move(source_name);
  std::unordered_set<std::string> seen;
  internal::ForEachJsonLine(in, [&](std::size_t line_number, const json& obj) {
    McqaInstance instance = InstanceFromJson(obj, line_number);
    ValidateInstance(instance);
    if (!seen.insert(instance.id).second) {
      throw ValidationError("duplicate instance id \"" + instance.id +
                            "\" at line " + std::to_string(line_number));
    }
    dataset.instances.push_back(std::move(instance));
  });
  return dataset;
}

Dataset LoadDataset(const std::filesystem::path& path) {
  auto in = internal::OpenForRead(path);
  return ReadDataset(in, path.string());
}

std::string SerializeInstance(const McqaInstance& instance) {
  ordered_json object;
  object["id"] = instance.id;
  object["question"] = instance.question;
  ordered_json options = ordered_json::array();
  for (const auto& option : instance.options) {
    ordered_json entry;
    entry["text"] = option.text;
    entry["context"] = option.context;
    options.push_back(std::move(entry));
  }
  object["options"] = std::move(options);
  object["gold"] = instance.gold;
  return internal::DumpCompact(object);
}

void WriteDataset(const Dataset& dataset, std::ostream& out) {
  for (const auto& instance : dataset.instances) {
    out << SerializeInstance(instance) << '\n';
  }
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path) {
  // Serialize first so an invalid string never leaves a truncated file.
  std::string buffer;
  for (const auto& instance : dataset.instances) {
    buffer += SerializeInstance(instance);
    buffer += '\n';
  }
  auto out = internal::OpenForWrite(path);
  out << buffer;
  out.flush();
  internal::CheckWritten(out, path);
}

TokenBag::TokenBag(std::vector<std::string> tokens) {
  std::sort(tokens.begin(), tokens.end());
  total_ = tokens.size();
  for (auto& token : tokens) {
    if (!entries_.empty() && entries_.back().first == token) {
      ++entries_.back().second;
    } else {
      entries_.emplace_back(std::move(token), 1);
    }
  }
}

std::uint32_t TokenBag::count(std::string_view token) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), token,
      [](const Entry& entry, std::string_view key) { return entry.first < key; });
  return it != entries_.end() && it->first == token ? it->second : 0;
}

std::vector<std::string> TokenBag::Flatten() const {
  std::vector<std::string> tokens;
  tokens.reserve(total_);
  for (const auto& [token, n] : entries_) {
    tokens.insert(tokens.end(), n, token);
  }
  return tokens;
}

std::size_t Overlap(const TokenBag& a, const TokenBag& b) {
  std::size_t shared = 0;
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  while (ia != a.entries().end() && ib != b.entries().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      shared += std::min(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  return shared;
}

std::size_t UnionSize(const TokenBag& a, const TokenBag& b) {
  return a.size() + b.size() - Overlap(a, b);
}

TokenBag Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, kEmptySentinel.size(), kEmptySentinel) == 0) {
      flush();
      i += kEmptySentinel.size() - 1;
      continue;
    }
    const auto c = static_cast<unsigned char>(text[i]);
    if (!IsWordByte(c)) {
      flush();
      continue;
    }
    current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                           : static_cast<char>(c));
  }
  flush();
  return TokenBag(std::move(tokens));
}

}  // namespace mcqa_probe
