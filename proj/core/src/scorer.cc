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

#include "mcqa_probe/scorer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "jsonl_internal.h"
#include "mcqa_probe/errors.h"

namespace mcqa_probe {

FeatureVector Featurize(const TokenBag& question, const TokenBag& option,
                        const TokenBag& context) {
  const double q_len = static_cast<double>(question.size());
  const double o_len = static_cast<double>(option.size());
  const double c_len = static_cast<double>(context.size());
  const auto option_context = static_cast<double>(Overlap(option, context));
  const auto option_context_union =
      static_cast<double>(UnionSize(option, context));

  FeatureVector f;
  f[kQuestionOptionOverlap] =
      static_cast<double>(Overlap(question, option)) / (o_len + 1.0);
  f[kQuestionContextOverlap] =
      static_cast<double>(Overlap(question, context)) / (q_len + 1.0);
  f[kOptionContextOverlap] = option_context / (o_len + 1.0);
  f[kOptionContextJaccard] = option_context_union == 0.0
                                 ? 0.0
                                 : option_context / option_context_union;
  f[kOptionLogLength] = std::log1p(o_len);
  f[kContextLogLength] = std::log1p(c_len);
  f[kBias] = 1.0;
  return f;
}

FeatureVector Featurize(std::string_view question, std::string_view option,
                        std::string_view context) {
  return Featurize(Tokenize(question), Tokenize(option), Tokenize(context));
}

std::string FormatTripletSequence(std::string_view question,
                                  std::string_view option,
                                  std::string_view context) {
  std::string out = "[CLS] ";
  out.append(context);
  out.append(" [SEP] ");
  out.append(question);
  out.append(" [SEP] ");
  out.append(option);
  out.append(" [SEP]");
  return out;
}

LinearScorer::LinearScorer(const FeatureVector& weights) : weights_(weights) {
  for (double w : weights_) {
    if (!std::isfinite(w)) throw ValidationError("model weight is not finite");
  }
}

double LinearScorer::Score(const FeatureVector& features) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumFeatures; ++i) sum += weights_[i] * features[i];
  return sum;
}

double LinearScorer::Score(std::string_view question, std::string_view option,
                           std::string_view context) const {
  return Score(Featurize(question, option, context));
}

ScoreMatrix LinearScorer::ScoreDataset(const Dataset& dataset) const {
  return ScoreDataset(dataset, 1);
}

ScoreMatrix LinearScorer::ScoreDataset(const Dataset& dataset,
                                       std::size_t threads) const {
  ScoreMatrix matrix;
  matrix.rows.resize(dataset.size());
  auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const McqaInstance& instance = dataset.instances[i];
      const TokenBag question = Tokenize(instance.question);
      auto& row = matrix.rows[i];
      row.reserve(instance.num_options());
      for (const auto& option : instance.options) {
        row.push_back(Score(Featurize(question, Tokenize(option.text),
                                      Tokenize(option.context))));
      }
    }
  };

  threads = std::max<std::size_t>(1, std::min(threads, dataset.size()));
  if (threads == 1) {
    score_range(0, dataset.size());
    return matrix;
  }
  {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (dataset.size() + threads - 1) / threads;
    for (std::size_t begin = 0; begin < dataset.size(); begin += chunk) {
      workers.emplace_back(score_range, begin,
                           std::min(dataset.size(), begin + chunk));
    }
  }
  return matrix;
}

std::string SerializeModel(const LinearScorer& model) {
  nlohmann::ordered_json object;
  object["format"] = kLinearModelFormat;
  object["weights"] = nlohmann::ordered_json::array();
  for (double w : model.weights()) object["weights"].push_back(w);
  return object.dump() + "\n";
}

LinearScorer ParseModel(std::string_view text) {
  nlohmann::json object;
  try {
    object = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("model file: ") + e.what());
  }
  if (!object.is_object()) throw ParseError(0, "model file: expected object");
  auto format = object.find("format");
  if (format == object.end() || !format->is_string() ||
      format->get<std::string>() != kLinearModelFormat) {
    throw ValidationError("model file: format must be \"" +
                          std::string(kLinearModelFormat) + "\"");
  }
  auto weights = object.find("weights");
  if (weights == object.end() || !weights->is_array() ||
      weights->size() != kNumFeatures) {
    throw ValidationError("model file: \"weights\" must hold " +
                          std::to_string(kNumFeatures) + " numbers");
  }
  FeatureVector w;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (!(*weights)[i].is_number()) {
      throw ValidationError("model file: weight " + std::to_string(i) +
                            " is not a number");
    }
    w[i] = (*weights)[i].get<double>();
  }
  return LinearScorer(w);
}

void SaveModel(const LinearScorer& model, const std::filesystem::path& path) {
  auto out = internal::OpenForWrite(path);
  out << SerializeModel(model);
  out.flush();
  internal::CheckWritten(out, path);
}

LinearScorer LoadModel(const std::filesystem::path& path) {
  auto in = internal::OpenForRead(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseModel(buffer.str());
}

}  // namespace mcqa_probe
