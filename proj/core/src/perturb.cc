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

#include "mcqa_probe/perturb.h"

#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "jsonl_internal.h"
#include "mcqa_probe/errors.h"
#include "mcqa_probe/rng.h"

namespace mcqa_probe {

std::string_view SettingName(PerturbationSetting setting) {
  switch (setting) {
    case PerturbationSetting::kOriginal: return "original";
    case PerturbationSetting::kPio: return "pio";
    case PerturbationSetting::kNo: return "no";
    case PerturbationSetting::kNq: return "nq";
    case PerturbationSetting::kNc: return "nc";
  }
  return "unknown";
}

std::string_view SettingLabel(PerturbationSetting setting) {
  switch (setting) {
    case PerturbationSetting::kOriginal: return "O";
    case PerturbationSetting::kPio: return "PIO";
    case PerturbationSetting::kNo: return "NO";
    case PerturbationSetting::kNq: return "NQ";
    case PerturbationSetting::kNc: return "NC";
  }
  return "?";
}

std::optional<PerturbationSetting> ParseSetting(std::string_view name) {
  for (auto setting : kAllSettings) {
    if (name == SettingName(setting)) return setting;
  }
  return std::nullopt;
}

std::string RepeatQuestion(std::string_view question) {
  std::string out;
  out.reserve((question.size() + 1) * kPioQuestionRepeats);
  for (std::size_t i = 0; i < kPioQuestionRepeats; ++i) {
    if (i > 0) out.push_back(' ');
    out.append(question);
  }
  return out;
}

PioResult PerturbPio(const Dataset& dataset, std::uint64_t seed) {
  PioResult result;
  result.dataset = dataset;
  result.choices.reserve(dataset.size());
  for (std::size_t i = 0; i < result.dataset.instances.size(); ++i) {
    McqaInstance& instance = result.dataset.instances[i];
    ValidateInstance(instance);
    RngState rng(DeriveSeed(seed, i));
    // The r-th incorrect index, skipping gold.
    std::size_t pick = UniformIndex(rng, instance.num_options() - 1);
    if (pick >= instance.gold) ++pick;
    OptionEntry& option = instance.options[pick];
    option.text = instance.question;
    option.context = RepeatQuestion(instance.question);
    result.choices.push_back({instance.id, pick});
  }
  return result;
}

namespace {

template <typename Fn>
Dataset MapInstances(const Dataset& dataset, Fn&& fn) {
  Dataset out = dataset;
  for (auto& instance : out.instances) fn(instance);
  return out;
}

}  // namespace

Dataset PerturbNo(const Dataset& dataset) {
  return MapInstances(dataset, [](McqaInstance& instance) {
    for (auto& option : instance.options) option.text = kEmptySentinel;
  });
}

Dataset PerturbNq(const Dataset& dataset) {
  return MapInstances(dataset, [](McqaInstance& instance) {
    instance.question = kEmptySentinel;
  });
}

Dataset PerturbNc(const Dataset& dataset) {
  return MapInstances(dataset, [](McqaInstance& instance) {
    for (auto& option : instance.options) option.context = kEmptySentinel;
  });
}

Dataset ApplySetting(const Dataset& dataset, PerturbationSetting setting,
                     std::uint64_t seed) {
  switch (setting) {
    case PerturbationSetting::kOriginal: return dataset;
    case PerturbationSetting::kPio: return PerturbPio(dataset, seed).dataset;
    case PerturbationSetting::kNo: return PerturbNo(dataset);
    case PerturbationSetting::kNq: return PerturbNq(dataset);
    case PerturbationSetting::kNc: return PerturbNc(dataset);
  }
  return dataset;
}

void WritePioChoices(std::span<const PioChoice> choices, std::ostream& out) {
  for (const auto& choice : choices) {
    nlohmann::ordered_json object;
    object["id"] = choice.instance_id;
    object["perturbed_option_index"] = choice.perturbed_option_index;
    out << internal::DumpCompact(object) << '\n';
  }
}

void SavePioChoices(std::span<const PioChoice> choices,
                    const std::filesystem::path& path) {
  auto out = internal::OpenForWrite(path);
  WritePioChoices(choices, out);
  out.flush();
  internal::CheckWritten(out, path);
}

std::vector<PioChoice> ReadPioChoices(std::istream& in) {
  std::vector<PioChoice> choices;
  internal::ForEachJsonLine(
      in, [&](std::size_t line_number, const nlohmann::json& object) {
        internal::RejectUnknownKeys(object, {"id", "perturbed_option_index"},
                                    line_number);
        choices.push_back(
            {internal::RequireString(object, "id", line_number),
             internal::RequireIndex(object, "perturbed_option_index",
                                    line_number)});
      });
  return choices;
}

std::vector<PioChoice> LoadPioChoices(const std::filesystem::path& path) {
  auto in = internal::OpenForRead(path);
  return ReadPioChoices(in);
}

}  // namespace mcqa_probe
