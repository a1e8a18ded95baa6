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

#ifndef MCQA_PROBE_REMOTE_H_
#define MCQA_PROBE_REMOTE_H_

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcqa_probe/dataset.h"
#include "mcqa_probe/scorer.h"

namespace mcqa_probe {

// Client side of the remote scoring protocol:
//
//   POST {endpoint_url}/score        Content-Type: application/json
//   {"items": [{"id", "question", "option", "context", "sequence"}, ...]}
//   -> {"scores": [{"id", "score"}, ...]}
//
// `sequence` is FormatTripletSequence of the raw fields; services may use
// either representation.

inline constexpr std::chrono::milliseconds kDefaultRemoteTimeout{30000};

struct RemoteScorerConfig {
  std::string endpoint_url;  // http://host[:port][/prefix]
  std::size_t batch_size = 64;
  std::chrono::milliseconds timeout = kDefaultRemoteTimeout;
  std::size_t workers = 1;  // concurrent batches in RemoteScoreAll

  // Throws ConfigError on batch_size == 0, workers == 0, a non-positive
  // timeout, or an unsupported URL.
  void Validate() const;
};

struct ScoreRequestItem {
  std::string id;
  std::string question;
  std::string option;
  std::string context;
};

struct ScoredItem {
  std::string id;
  double score = 0.0;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

std::string EncodeScoreRequest(std::span<const ScoreRequestItem> items);

// Scores aligned with `requested` order. Throws ScoringError on malformed
// bodies, missing, unknown or duplicated ids, and non-finite scores.
std::vector<ScoredItem> DecodeScoreResponse(
    std::string_view body, std::span<const ScoreRequestItem> requested);

// One request. `batch` must be non-empty and hold at most batch_size items.
// A timed-out request is retried once before failing.
std::vector<ScoredItem> RemoteScore(const RemoteScorerConfig& config,
                                    std::span<const ScoreRequestItem> batch);

// Splits `items` into ceil(n / batch_size) requests issued by up to
// config.workers threads; returns scores in item order. Failures name the
// batch; the lowest failing batch wins.
std::vector<double> RemoteScoreAll(const RemoteScorerConfig& config,
                                   std::span<const ScoreRequestItem> items);

// Item id for option `index` of instance `instance_id`: "<id>/<index>".
std::string RemoteItemId(std::string_view instance_id, std::size_t index);

class RemoteScorer : public Scorer {
 public:
  explicit RemoteScorer(RemoteScorerConfig config);
  ScoreMatrix ScoreDataset(const Dataset& dataset) const override;

 private:
  RemoteScorerConfig config_;
};

}  // namespace mcqa_probe

#endif  // MCQA_PROBE_REMOTE_H_
