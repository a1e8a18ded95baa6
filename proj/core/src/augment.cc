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

#include "mcqa_probe/augment.h"

#include <ostream>

#include <nlohmann/json.hpp>

#include "jsonl_internal.h"
#include "mcqa_probe/errors.h"

namespace mcqa_probe {
namespace {

bool IsProbability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void AugmentConfig::Validate() const {
  if (!IsProbability(p_correct)) {
    throw ConfigError("p_correct must lie in [0, 1], got " +
                      std::to_string(p_correct));
  }
  if (!IsProbability(p_incorrect)) {
    throw ConfigError("p_incorrect must lie in [0, 1], got " +
                      std::to_string(p_incorrect));
  }
}

IncorrectPool::IncorrectPool(const McqaInstance& instance)
    : instance_(&instance) {
  indices_.reserve(instance.num_options());
  for (std::size_t i = 0; i < instance.num_options(); ++i) {
    if (i != instance.gold) indices_.push_back(i);
  }
}

std::string_view IncorrectPool::option_text(std::size_t i) const {
  return instance_->options[indices_[i]].text;
}

std::string_view IncorrectPool::context(std::size_t i) const {
  return instance_->options[indices_[i]].context;
}

std::vector<LabeledTriplet> RawTriplets(const McqaInstance& instance) {
  std::vector<LabeledTriplet> triplets;
  triplets.reserve(instance.num_options());
  for (std::size_t i = 0; i < instance.num_options(); ++i) {
    triplets.push_back({instance.question, instance.options[i].text,
                        instance.options[i].context,
                        i == instance.gold ? TripletLabel::kPositive
                                           : TripletLabel::kNegative,
                        instance.id, i});
  }
  return triplets;
}

std::vector<LabeledTriplet> AugmentInstance(
    const McqaInstance& instance, std::optional<std::string_view> prev_question,
    const AugmentConfig& config, RngState& rng,
    std::vector<AugmentDecision>* decisions) {
  return AugmentInstance<RngState>(instance, prev_question, config, rng,
                                   decisions);
}

std::string_view PreviousQuestion(const Dataset& dataset, std::size_t index) {
  const auto& instances = dataset.instances;
  return instances[index == 0 ? instances.size() - 1 : index - 1].question;
}

std::vector<LabeledTriplet> AugmentDatasetInstance(
    const Dataset& dataset, std::size_t index, const AugmentConfig& config,
    std::uint64_t epoch, std::vector<AugmentDecision>* decisions) {
  RngState rng(DeriveSeed(DeriveSeed(config.seed, epoch), index));
  return AugmentInstance(dataset.instances[index],
                         PreviousQuestion(dataset, index), config, rng,
                         decisions);
}

std::vector<LabeledTriplet> AugmentEpoch(
    const Dataset& dataset, const AugmentConfig& config, std::uint64_t epoch,
    std::vector<AugmentDecision>* decisions) {
  config.Validate();
  std::vector<LabeledTriplet> triplets;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto part = AugmentDatasetInstance(dataset, i, config, epoch, decisions);
    triplets.insert(triplets.end(), std::make_move_iterator(part.begin()),
                    std::make_move_iterator(part.end()));
  }
  return triplets;
}

void WriteTriplets(std::span<const LabeledTriplet> triplets,
                   std::ostream& out) {
  for (const auto& triplet : triplets) {
    nlohmann::ordered_json object;
    object["origin_id"] = triplet.origin_id;
    object["origin_index"] = triplet.origin_index;
    object["question"] = triplet.question;
    object["option"] = triplet.option_text;
    object["context"] = triplet.context;
    object["label"] = static_cast<int>(triplet.label);
    out << internal::DumpCompact(object) << '\n';
  }
}

void SaveTriplets(std::span<const LabeledTriplet> triplets,
                  const std::filesystem::path& path) {
  auto out = internal::OpenForWrite(path);
  WriteTriplets(triplets, out);
  out.flush();
  internal::CheckWritten(out, path);
}

}  // namespace mcqa_probe
