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

#include "mcqa_probe/remote.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mcqa_probe/errors.h"

namespace mcqa_probe {
namespace {

struct Endpoint {
  std::string scheme_host_port;
  std::string score_path;
};

Endpoint ParseEndpoint(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme) {
    throw ConfigError("remote endpoint must start with http://: " +
                      std::string(url));
  }
  const std::size_t slash = url.find('/', kScheme.size());
  Endpoint endpoint;
  endpoint.scheme_host_port = std::string(url.substr(0, slash));
  if (endpoint.scheme_host_port.size() == kScheme.size()) {
    throw ConfigError("remote endpoint has no host: " + std::string(url));
  }
  std::string prefix =
      slash == std::string_view::npos ? "" : std::string(url.substr(slash));
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  endpoint.score_path = prefix + "/score";
  return endpoint;
}

bool IsTimeout(httplib::Error error) {
  return error == httplib::Error::ConnectionTimeout ||
         error == httplib::Error::Read || error == httplib::Error::Write;
}

}  // namespace

void RemoteScorerConfig::Validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (workers == 0) throw ConfigError("workers must be at least 1");
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
  ParseEndpoint(endpoint_url);
}

std::string EncodeScoreRequest(std::span<const ScoreRequestItem> items) {
  nlohmann::ordered_json body;
  auto& array = body["items"] = nlohmann::ordered_json::array();
  for (const auto& item : items) {
    nlohmann::ordered_json entry;
    entry["id"] = item.id;
    entry["question"] = item.question;
    entry["option"] = item.option;
    entry["context"] = item.context;
    entry["sequence"] =
        FormatTripletSequence(item.question, item.option, item.context);
    array.push_back(std::move(entry));
  }
  try {
    return body.dump();
  } catch (const nlohmann::json::type_error& e) {
    throw ValidationError(std::string("cannot encode request: ") + e.what());
  }
}

std::vector<ScoredItem> DecodeScoreResponse(
    std::string_view body, std::span<const ScoreRequestItem> requested) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ScoringError(std::string("malformed response body: ") + e.what());
  }
  if (!parsed.is_object() || !parsed.contains("scores") ||
      !parsed["scores"].is_array()) {
    throw ScoringError("response must be an object with a \"scores\" array");
  }

  std::unordered_map<std::string, std::size_t> slot;
  slot.reserve(requested.size());
  for (std::size_t i = 0; i < requested.size(); ++i) {
    slot.emplace(requested[i].id, i);
  }
  std::vector<std::optional<double>> scores(requested.size());
  for (const auto& entry : parsed["scores"]) {
    if (!entry.is_object() || !entry.contains("id") ||
        !entry["id"].is_string() || !entry.contains("score") ||
        !entry["score"].is_number()) {
      throw ScoringError(
          "each score entry needs a string \"id\" and a numeric \"score\"");
    }
    const auto id = entry["id"].get<std::string>();
    const double score = entry["score"].get<double>();
    auto it = slot.find(id);
    if (it == slot.end()) {
      throw ScoringError("response contains unrequested id \"" + id + "\"");
    }
    if (scores[it->second].has_value()) {
      throw ScoringError("response repeats id \"" + id + "\"");
    }
    if (!std::isfinite(score)) {
      throw ScoringError("non-finite score for id \"" + id + "\"");
    }
    scores[it->second] = score;
  }

  std::vector<ScoredItem> out;
  out.reserve(requested.size());
  for (std::size_t i = 0; i < requested.size(); ++i) {
    if (!scores[i].has_value()) {
      throw ScoringError("response is missing id \"" + requested[i].id + "\"");
    }
    out.push_back({requested[i].id, *scores[i]});
  }
  return out;
}

std::vector<ScoredItem> RemoteScore(const RemoteScorerConfig& config,
                                    std::span<const ScoreRequestItem> batch) {
  config.Validate();
  if (batch.empty()) throw ValidationError("remote batch is empty");
  if (batch.size() > config.batch_size) {
    throw ValidationError("remote batch of " + std::to_string(batch.size()) +
                          " exceeds batch_size " +
                          std::to_string(config.batch_size));
  }
  const Endpoint endpoint = ParseEndpoint(config.endpoint_url);
  const std::string body = EncodeScoreRequest(batch);

  httplib::Client client(endpoint.scheme_host_port);
  client.set_connection_timeout(config.timeout);
  client.set_read_timeout(config.timeout);
  client.set_write_timeout(config.timeout);

  auto result = client.Post(endpoint.score_path, body, "application/json");
  if (!result && IsTimeout(result.error())) {
    result = client.Post(endpoint.score_path, body, "application/json");
  }
  if (!result) {
    throw ScoringError("request to " + config.endpoint_url + " failed: " +
                       httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw ScoringError("remote scorer returned HTTP " +
                       std::to_string(result->status));
  }
  return DecodeScoreResponse(result->body, batch);
}

std::vector<double> RemoteScoreAll(const RemoteScorerConfig& config,
                                   std::span<const ScoreRequestItem> items) {
  config.Validate();
  const std::size_t num_batches =
      (items.size() + config.batch_size - 1) / config.batch_size;
  std::vector<double> scores(items.size());
  std::vector<std::exception_ptr> failures(num_batches);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t b = next++; b < num_batches; b = next++) {
      const std::size_t begin = b * config.batch_size;
      const std::size_t end = std::min(items.size(), begin + config.batch_size);
      try {
        auto scored = RemoteScore(config, items.subspan(begin, end - begin));
        for (std::size_t i = 0; i < scored.size(); ++i) {
          scores[begin + i] = scored[i].score;
        }
      } catch (const std::exception& e) {
        failures[b] = std::make_exception_ptr(ScoringError(
            "batch " + std::to_string(b) + " (items " + std::to_string(begin) +
            ".." + std::to_string(end - 1) + "): " + e.what()));
      }
    }
  };

  const std::size_t num_workers = std::min(config.workers, num_batches);
  if (num_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < num_workers; ++i) pool.emplace_back(worker);
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return scores;
}

std::string RemoteItemId(std::string_view instance_id, std::size_t index) {
  return std::string(instance_id) + "/" + std::to_string(index);
}

RemoteScorer::RemoteScorer(RemoteScorerConfig config)
    : config_(std::move(config)) {
  config_.Validate();
}

ScoreMatrix RemoteScorer::ScoreDataset(const Dataset& dataset) const {
  std::vector<ScoreRequestItem> items;
  for (const auto& instance : dataset.instances) {
    for (std::size_t i = 0; i < instance.num_options(); ++i) {
      items.push_back({RemoteItemId(instance.id, i), instance.question,
                       instance.options[i].text, instance.options[i].context});
    }
  }
  const std::vector<double> scores = RemoteScoreAll(config_, items);

  ScoreMatrix matrix;
  matrix.rows.reserve(dataset.size());
  std::size_t next = 0;
  for (const auto& instance : dataset.instances) {
    matrix.rows.emplace_back(scores.begin() + next,
                             scores.begin() + next + instance.num_options());
    next += instance.num_options();
  }
  return matrix;
}

}  // namespace mcqa_probe
