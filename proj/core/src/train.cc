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

#include "mcqa_probe/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "mcqa_probe/errors.h"
#include "mcqa_probe/rng.h"

namespace mcqa_probe {
namespace {

// log(1 + exp(x)) without overflow.
double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void Step(FeatureVector& weights, const FeatureVector& grad, double lr) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) weights[i] -= lr * grad[i];
}

std::vector<std::size_t> ShuffledOrder(std::size_t n, std::uint64_t seed,
                                       std::uint64_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  RngState rng(DeriveSeed(seed, epoch));
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[UniformIndex(rng, i)]);
  }
  return order;
}

struct FeaturizedTriplet {
  FeatureVector features;
  TripletLabel label;
};

std::vector<FeaturizedTriplet> FeaturizeTriplets(
    std::span<const LabeledTriplet> triplets) {
  std::vector<FeaturizedTriplet> out;
  out.reserve(triplets.size());
  for (const auto& t : triplets) {
    out.push_back({Featurize(t.question, t.option_text, t.context), t.label});
  }
  return out;
}

}  // namespace

std::string_view LossName(LossKind loss) {
  return loss == LossKind::kMulticlass ? "multiclass" : "binary";
}

std::optional<LossKind> ParseLoss(std::string_view name) {
  if (name == "multiclass") return LossKind::kMulticlass;
  if (name == "binary") return LossKind::kBinary;
  return std::nullopt;
}

void TrainConfig::Validate() const {
  if (epochs == 0) throw ConfigError("epochs must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be a positive finite number");
  }
  if (augment.has_value()) {
    augment->Validate();
    if (loss == LossKind::kMulticlass) {
      throw ConfigError(
          "augmentation flips per-triplet labels and requires the binary "
          "loss");
    }
  }
}

std::vector<double> Softmax(std::span<const double> scores) {
  std::vector<double> p(scores.size());
  if (scores.empty()) return p;
  const double max = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    p[i] = std::exp(scores[i] - max);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

LossGrad MulticlassLossGrad(const LinearScorer& model,
                            std::span<const FeatureVector> option_features,
                            std::size_t gold) {
  std::vector<double> scores(option_features.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = model.Score(option_features[i]);
  }
  const double max = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double s : scores) total += std::exp(s - max);
  const double log_normalizer = max + std::log(total);

  LossGrad out;
  out.loss = log_normalizer - scores[gold];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double residual =
        std::exp(scores[i] - log_normalizer) - (i == gold ? 1.0 : 0.0);
    for (std::size_t d = 0; d < kNumFeatures; ++d) {
      out.grad[d] += residual * option_features[i][d];
    }
  }
  return out;
}

LossGrad BinaryLossGrad(const LinearScorer& model,
                        const FeatureVector& features, TripletLabel label) {
  const double s = model.Score(features);
  const double y = label == TripletLabel::kPositive ? 1.0 : 0.0;
  LossGrad out;
  out.loss = Softplus(s) - y * s;
  const double residual = Sigmoid(s) - y;
  for (std::size_t d = 0; d < kNumFeatures; ++d) {
    out.grad[d] = residual * features[d];
  }
  return out;
}

TrainRecord Train(
    const Dataset& dataset, const TrainConfig& config,
    const std::function<void(std::size_t, double)>& on_epoch) {
  config.Validate();
  if (dataset.empty()) throw ValidationError("training dataset is empty");
  for (const auto& instance : dataset.instances) ValidateInstance(instance);

  // Unaugmented features never change; compute them once.
  std::vector<std::vector<FeaturizedTriplet>> raw(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    raw[i] = FeaturizeTriplets(RawTriplets(dataset.instances[i]));
  }

  FeatureVector weights{};
  TrainRecord record;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const bool augmented =
        config.augment.has_value() && epoch >= config.augment_start_epoch;
    double loss_sum = 0.0;
    std::size_t loss_count = 0;

    for (std::size_t index : ShuffledOrder(dataset.size(), config.seed, epoch)) {
      if (config.loss == LossKind::kMulticlass) {
        std::vector<FeatureVector> features;
        features.reserve(raw[index].size());
        for (const auto& t : raw[index]) features.push_back(t.features);
        const LossGrad lg = MulticlassLossGrad(
            LinearScorer(weights), features, dataset.instances[index].gold);
        Step(weights, lg.grad, config.learning_rate);
        loss_sum += lg.loss;
        ++loss_count;
        continue;
      }

      std::vector<FeaturizedTriplet> augmented_triplets;
      if (augmented) {
        augmented_triplets = FeaturizeTriplets(
            AugmentDatasetInstance(dataset, index, *config.augment, epoch));
      }
      const auto& triplets = augmented ? augmented_triplets : raw[index];
      for (const auto& t : triplets) {
        const LossGrad lg = BinaryLossGrad(LinearScorer(weights), t.features,
                                           t.label);
        Step(weights, lg.grad, config.learning_rate);
        loss_sum += lg.loss;
        ++loss_count;
      }
    }

    const double mean = loss_sum / static_cast<double>(loss_count);
    record.epoch_losses.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  record.model = LinearScorer(weights);
  return record;
}

void WriteTrainLog(std::span<const double> epoch_losses, std::ostream& out) {
  for (std::size_t epoch = 0; epoch < epoch_losses.size(); ++epoch) {
    nlohmann::ordered_json line;
    line["epoch"] = epoch;
    line["mean_loss"] = epoch_losses[epoch];
    out << line.dump() << '\n';
  }
}

}  // namespace mcqa_probe
