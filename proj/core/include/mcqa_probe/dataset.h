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

#ifndef MCQA_PROBE_DATASET_H_
#define MCQA_PROBE_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mcqa_probe {

// Literal used for every "empty" input. Tokenizes to nothing.
inline constexpr std::string_view kEmptySentinel = "<s>";

inline constexpr std::size_t kMinOptions = 2;
inline constexpr std::size_t kMaxOptions = 26;

struct OptionEntry {
  std::string text;
  std::string context;

  friend bool operator==(const OptionEntry&, const OptionEntry&) = default;
};

// One k-way question. Options carry their own supporting context; datasets
// with a shared passage repeat it in every entry.
struct McqaInstance {
  std::string id;
  std::string question;
  std::vector<OptionEntry> options;
  std::size_t gold = 0;

  std::size_t num_options() const { return options.size(); }

  friend bool operator==(const McqaInstance&, const McqaInstance&) = default;
};

// Instances in file order.
struct Dataset {
  std::vector<McqaInstance> instances;
  std::string source_path;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
};

// Structural equality; ignores source_path.
bool SameInstances(const Dataset& a, const Dataset& b);

// Throws ValidationError naming the instance when 2 <= k <= 26 or
// 0 <= gold < k does not hold.
void ValidateInstance(const McqaInstance& instance);

// Line-delimited JSON, one instance per line:
//   {"id":..., "question":..., "options":[{"text":..., "context":...}], "gold":...}
// Throws ParseError (with line number) on malformed lines and
// ValidationError on invariant violations, including duplicate ids.
// Empty lines are skipped.
Dataset ReadDataset(std::istream& in, std::string source_name = "<stream>");
Dataset LoadDataset(const std::filesystem::path& path);

// Canonical serialization: compact JSON, keys in schema order, LF endings.
std::string SerializeInstance(const McqaInstance& instance);
void WriteDataset(const Dataset& dataset, std::ostream& out);
void SaveDataset(const Dataset& dataset, const std::filesystem::path& path);

// Multiset of lowercase tokens, stored sorted by token.
class TokenBag {
 public:
  using Entry = std::pair<std::string, std::uint32_t>;

  TokenBag() = default;
  // Tokens in any order; duplicates are counted.
  explicit TokenBag(std::vector<std::string> tokens);

  // Total number of tokens, counting multiplicity.
  std::size_t size() const { return total_; }
  bool empty() const { return total_ == 0; }
  std::size_t distinct() const { return entries_.size(); }
  std::uint32_t count(std::string_view token) const;
  const std::vector<Entry>& entries() const { return entries_; }

  // Tokens in sorted order, each repeated by its count.
  std::vector<std::string> Flatten() const;

  friend bool operator==(const TokenBag&, const TokenBag&) = default;

 private:
  std::vector<Entry> entries_;
  std::size_t total_ = 0;
};

// Multiset intersection size: sum over tokens of min(count_a, count_b).
std::size_t Overlap(const TokenBag& a, const TokenBag& b);
// Multiset union size: sum over tokens of max(count_a, count_b).
std::size_t UnionSize(const TokenBag& a, const TokenBag& b);

// Lowercases ASCII, removes every "<s>" marker, then splits on any ASCII
// character that is not a letter or digit. Bytes >= 0x80 are word
// characters, so UTF-8 words stay intact.
TokenBag Tokenize(std::string_view text);

}  // namespace mcqa_probe

#endif  // MCQA_PROBE_DATASET_H_
