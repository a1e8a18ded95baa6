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

#ifndef MCQA_PROBE_TRAIN_H_
#define MCQA_PROBE_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mcqa_probe/augment.h"
#include "mcqa_probe/dataset.h"
#include "mcqa_probe/scorer.h"

namespace mcqa_probe {

enum class LossKind {
  kMulticlass,  // softmax cross-entropy over the k options of an instance
  kBinary,      // logistic loss on each triplet independently
};

std::string_view LossName(LossKind loss);
std::optional<LossKind> ParseLoss(std::string_view name);

inline constexpr std::size_t kDefaultEpochs = 4;
// One extra epoch when training with augmentation.
inline constexpr std::size_t kDefaultAugmentedEpochs = 5;

struct TrainConfig {
  LossKind loss = LossKind::kBinary;
  std::size_t epochs = kDefaultEpochs;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  std::optional<AugmentConfig> augment;
  // First (0-based) epoch that sees augmented triplets.
  std::size_t augment_start_epoch = 0;

  // Throws ConfigError on epochs == 0, a non-positive or non-finite
  // learning rate, invalid augmentation probabilities, or multiclass loss
  // combined with augmentation.
  void Validate() const;
};

struct TrainRecord {
  std::vector<double> epoch_losses;  // mean loss per epoch
  LinearScorer model;
};

// Max-shifted softmax.
std::vector<double> Softmax(std::span<const double> scores);

struct LossGrad {
  double loss = 0.0;
  FeatureVector grad{};
};

// -log softmax(s)[gold] and its gradient sum_i (p_i - [i == gold]) f_i.
LossGrad MulticlassLossGrad(const LinearScorer& model,
                            std::span<const FeatureVector> option_features,
                            std::size_t gold);

// Logistic loss softplus(s) - y s and its gradient (sigmoid(s) - y) f.
LossGrad BinaryLossGrad(const LinearScorer& model,
                        const FeatureVector& features, TripletLabel label);

// Plain SGD from zero weights. Each epoch visits instances in the order of
// a Fisher-Yates shuffle driven by RngState(DeriveSeed(seed, epoch)); the
// multiclass loss steps once per instance, the binary loss once per
// triplet. Throws ValidationError on an empty dataset.
TrainRecord Train(
    const Dataset& dataset, const TrainConfig& config,
    const std::function<void(std::size_t epoch, double mean_loss)>& on_epoch =
        {});

// Training log line: {"epoch": e, "mean_loss": x}.
void WriteTrainLog(std::span<const double> epoch_losses, std::ostream& out);

}  // namespace mcqa_probe

#endif  // MCQA_PROBE_TRAIN_H_
