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

#ifndef MCQA_PROBE_PERTURB_H_
#define MCQA_PROBE_PERTURB_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcqa_probe/dataset.h"

namespace mcqa_probe {

// The unmodified data plus the four zero-information probes.
enum class PerturbationSetting {
  kOriginal,
  kPio,  // perturbed incorrect option: one distractor echoes the question
  kNo,   // no option text
  kNq,   // no question
  kNc,   // no context
};

inline constexpr std::array<PerturbationSetting, 5> kAllSettings = {
    PerturbationSetting::kOriginal, PerturbationSetting::kPio,
    PerturbationSetting::kNo, PerturbationSetting::kNq,
    PerturbationSetting::kNc};

// Lowercase CLI spelling: original, pio, no, nq, nc.
std::string_view SettingName(PerturbationSetting setting);
// Column label: O, PIO, NO, NQ, NC.
std::string_view SettingLabel(PerturbationSetting setting);
std::optional<PerturbationSetting> ParseSetting(std::string_view name);

// Number of question copies in a PIO context.
inline constexpr std::size_t kPioQuestionRepeats = 10;

struct PioChoice {
  std::string instance_id;
  std::size_t perturbed_option_index = 0;

  friend bool operator==(const PioChoice&, const PioChoice&) = default;
};

struct PioResult {
  Dataset dataset;
  std::vector<PioChoice> choices;  // one per instance, in dataset order
};

// `question` joined with single spaces, kPioQuestionRepeats times.
std::string RepeatQuestion(std::string_view question);

// For every instance picks one incorrect option uniformly, using the stream
// RngState(DeriveSeed(seed, instance_index)), and rewrites it to
// text = question, context = RepeatQuestion(question).
PioResult PerturbPio(const Dataset& dataset, std::uint64_t seed);

// Every option text becomes "<s>".
Dataset PerturbNo(const Dataset& dataset);
// Every question becomes "<s>".
Dataset PerturbNq(const Dataset& dataset);
// Every context becomes "<s>".
Dataset PerturbNc(const Dataset& dataset);

// Dispatches on `setting`; `seed` is only consumed by kPio, whose audit
// choices are dropped here.
Dataset ApplySetting(const Dataset& dataset, PerturbationSetting setting,
                     std::uint64_t seed);

// Audit log: {"id": ..., "perturbed_option_index": ...} per line.
void WritePioChoices(std::span<const PioChoice> choices, std::ostream& out);
void SavePioChoices(std::span<const PioChoice> choices,
                    const std::filesystem::path& path);
std::vector<PioChoice> ReadPioChoices(std::istream& in);
std::vector<PioChoice> LoadPioChoices(const std::filesystem::path& path);

}  // namespace mcqa_probe

#endif  // MCQA_PROBE_PERTURB_H_
