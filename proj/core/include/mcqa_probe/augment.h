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

#ifndef MCQA_PROBE_AUGMENT_H_
#define MCQA_PROBE_AUGMENT_H_

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
#include "mcqa_probe/rng.h"

namespace mcqa_probe {

struct AugmentConfig {
  double p_correct = 0.2;    // firing probability for the gold triplet
  double p_incorrect = 0.8;  // firing probability for each distractor
  std::uint64_t seed = 0;

  // Throws ConfigError unless both probabilities lie in [0, 1].
  void Validate() const;
};

enum class TripletLabel : int { kNegative = 0, kPositive = 1 };

// One (question, option, context) training example.
struct LabeledTriplet {
  std::string question;
  std::string option_text;
  std::string context;
  TripletLabel label = TripletLabel::kNegative;
  std::string origin_id;
  std::size_t origin_index = 0;

  friend bool operator==(const LabeledTriplet&,
                         const LabeledTriplet&) = default;
};

enum class AugmentBranch { kNone, kContext, kOption, kQuestion };

// What the sampler did to one triplet.
struct AugmentDecision {
  bool fired = false;
  AugmentBranch branch = AugmentBranch::kNone;
  // false: the field became "<s>"; true: it was replaced from the pool (or
  // by the previous question).
  bool replaced = false;
  // Option index the replacement was copied from (context/option branches).
  std::optional<std::size_t> source_index;

  friend bool operator==(const AugmentDecision&,
                         const AugmentDecision&) = default;
};

// Indices of the instance's incorrect options; replacement texts and
// contexts are only ever drawn from here.
class IncorrectPool {
 public:
  explicit IncorrectPool(const McqaInstance& instance);

  std::size_t size() const { return indices_.size(); }
  std::size_t index(std::size_t i) const { return indices_[i]; }
  std::string_view option_text(std::size_t i) const;
  std::string_view context(std::size_t i) const;

 private:
  const McqaInstance* instance_;
  std::vector<std::size_t> indices_;
};

// Unmodified triplets: gold positive, the rest negative.
std::vector<LabeledTriplet> RawTriplets(const McqaInstance& instance);

// Rewrites the k triplets of one instance. Per option, in option order, the
// draws are consumed as: fire, branch, sub-choice, replacement index (the
// last only for a pool replacement).
//
//   gold,       Bernoulli(p_correct):   label -> negative; one of
//                                        {context, option, question}
//   distractor, Bernoulli(p_incorrect): one of {context, option}
//
// The sub-choice picks "<s>" (first) or the replacement (second): a uniform
// pool entry for context/option, `prev_question` for the question branch.
// Without a previous question the question branch always uses "<s>".
template <RandomBitSource Source>
std::vector<LabeledTriplet> AugmentInstance(
    const McqaInstance& instance, std::optional<std::string_view> prev_question,
    const AugmentConfig& config, Source& rng,
    std::vector<AugmentDecision>* decisions = nullptr);

std::vector<LabeledTriplet> AugmentInstance(
    const McqaInstance& instance, std::optional<std::string_view> prev_question,
    const AugmentConfig& config, RngState& rng,
    std::vector<AugmentDecision>* decisions = nullptr);

// The previous question of instance i is that of instance i - 1; instance 0
// wraps around to the last instance.
std::string_view PreviousQuestion(const Dataset& dataset, std::size_t index);

// Augments one instance of the dataset for `epoch`, using the stream
// RngState(DeriveSeed(DeriveSeed(config.seed, epoch), index)).
std::vector<LabeledTriplet> AugmentDatasetInstance(
    const Dataset& dataset, std::size_t index, const AugmentConfig& config,
    std::uint64_t epoch, std::vector<AugmentDecision>* decisions = nullptr);

// All triplets of one epoch in dataset order; exactly sum(k_i) of them.
std::vector<LabeledTriplet> AugmentEpoch(
    const Dataset& dataset, const AugmentConfig& config, std::uint64_t epoch,
    std::vector<AugmentDecision>* decisions = nullptr);

// {"origin_id", "origin_index", "question", "option", "context", "label"}
// per line; label is 1 for positive, 0 for negative.
void WriteTriplets(std::span<const LabeledTriplet> triplets, std::ostream& out);
void SaveTriplets(std::span<const LabeledTriplet> triplets,
                  const std::filesystem::path& path);

// --- implementation -------------------------------------------------------

template <RandomBitSource Source>
std::vector<LabeledTriplet> AugmentInstance(
    const McqaInstance& instance, std::optional<std::string_view> prev_question,
    const AugmentConfig& config, Source& rng,
    std::vector<AugmentDecision>* decisions) {
  ValidateInstance(instance);
  const IncorrectPool pool(instance);
  std::vector<LabeledTriplet> triplets = RawTriplets(instance);

  for (std::size_t i = 0; i < triplets.size(); ++i) {
    LabeledTriplet& triplet = triplets[i];
    AugmentDecision decision;
    const bool is_gold = i == instance.gold;
    decision.fired =
        Bernoulli(rng, is_gold ? config.p_correct : config.p_incorrect);
    if (decision.fired) {
      if (is_gold) triplet.label = TripletLabel::kNegative;
      const std::size_t branch = UniformIndex(rng, is_gold ? 3 : 2);
      decision.branch = branch == 0   ? AugmentBranch::kContext
                        : branch == 1 ? AugmentBranch::kOption
                                      : AugmentBranch::kQuestion;
      decision.replaced = UniformIndex(rng, 2) == 1;

      switch (decision.branch) {
        case AugmentBranch::kContext:
        case AugmentBranch::kOption: {
          std::string& field = decision.branch == AugmentBranch::kContext
                                   ? triplet.context
                                   : triplet.option_text;
          if (decision.replaced) {
            const std::size_t slot = UniformIndex(rng, pool.size());
            decision.source_index = pool.index(slot);
            field = decision.branch == AugmentBranch::kContext
                        ? pool.context(slot)
                        : pool.option_text(slot);
          } else {
            field = kEmptySentinel;
          }
          break;
        }
        case AugmentBranch::kQuestion:
          if (decision.replaced && prev_question.has_value()) {
            triplet.question = *prev_question;
          } else {
            decision.replaced = false;
            triplet.question = kEmptySentinel;
          }
          break;
        case AugmentBranch::kNone:
          break;
      }
    }
    if (decisions != nullptr) decisions->push_back(decision);
  }
  return triplets;
}

}  // namespace mcqa_probe

#endif  // MCQA_PROBE_AUGMENT_H_
