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

#ifndef MCQA_PROBE_SCORER_H_
#define MCQA_PROBE_SCORER_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mcqa_probe/dataset.h"

namespace mcqa_probe {

// Lexical features of a (question, option, context) triplet. With |x| the
// token count and overlap the multiset intersection size:
//
//   0  overlap(q, o) / (|o| + 1)
//   1  overlap(q, c) / (|q| + 1)
//   2  overlap(o, c) / (|o| + 1)
//   3  jaccard(o, c)            multiset; 0 when both bags are empty
//   4  log(1 + |o|)
//   5  log(1 + |c|)
//   6  bias, always 1
inline constexpr std::size_t kNumFeatures = 7;
using FeatureVector = std::array<double, kNumFeatures>;

enum Feature : std::size_t {
  kQuestionOptionOverlap = 0,
  kQuestionContextOverlap = 1,
  kOptionContextOverlap = 2,
  kOptionContextJaccard = 3,
  kOptionLogLength = 4,
  kContextLogLength = 5,
  kBias = 6,
};

FeatureVector Featurize(std::string_view question, std::string_view option,
                        std::string_view context);
FeatureVector Featurize(const TokenBag& question, const TokenBag& option,
                        const TokenBag& context);

// "[CLS] c [SEP] q [SEP] o [SEP]": the encoder input ordering used by
// transformer MCQA scorers, forwarded to remote services.
std::string FormatTripletSequence(std::string_view question,
                                  std::string_view option,
                                  std::string_view context);

// Per-instance option logits, rows aligned with dataset order.
struct ScoreMatrix {
  std::vector<std::vector<double>> rows;

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;
};

// Anything that assigns a logit to every option of every instance.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual ScoreMatrix ScoreDataset(const Dataset& dataset) const = 0;
};

inline constexpr std::string_view kLinearModelFormat = "mcqa-probe-linear-v1";

class LinearScorer : public Scorer {
 public:
  LinearScorer() { weights_.fill(0.0); }
  // Throws ValidationError on a non-finite weight.
  explicit LinearScorer(const FeatureVector& weights);

  const FeatureVector& weights() const { return weights_; }

  double Score(const FeatureVector& features) const;
  double Score(std::string_view question, std::string_view option,
               std::string_view context) const;

  ScoreMatrix ScoreDataset(const Dataset& dataset) const override;
  // Splits instances across `threads` workers; the result does not depend
  // on the thread count.
  ScoreMatrix ScoreDataset(const Dataset& dataset, std::size_t threads) const;

  friend bool operator==(const LinearScorer& a, const LinearScorer& b) {
    return a.weights_ == b.weights_;
  }

 private:
  FeatureVector weights_;
};

// {"format": "mcqa-probe-linear-v1", "weights": [w0, ..., w6]}
std::string SerializeModel(const LinearScorer& model);
LinearScorer ParseModel(std::string_view text);
void SaveModel(const LinearScorer& model, const std::filesystem::path& path);
LinearScorer LoadModel(const std::filesystem::path& path);

}  // namespace mcqa_probe

#endif  // MCQA_PROBE_SCORER_H_
