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

#include "mcqa_probe/evalreport.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "jsonl_internal.h"
#include "mcqa_probe/errors.h"

namespace mcqa_probe {
namespace {

void CheckPercentage(double value, std::string_view what) {
  if (!(value >= 0.0 && value <= 100.0)) {
    throw ValidationError(std::string(what) + " must lie in [0, 100], got " +
                          std::to_string(value));
  }
}

std::string ColumnHeader(PerturbationSetting setting) {
  std::string header(SettingLabel(setting));
  header += SettingDirection(setting) == Direction::kHigherBetter ? " (↑)"
                                                                  : " (↓)";
  return header;
}

std::string Cell(const std::optional<double>& value) {
  return value.has_value() ? FormatOneDecimal(*value)
                           : std::string(kMissingCell);
}

struct Table {
  std::vector<std::string> header;
  std::size_t label_columns = 0;  // left-aligned leading columns
  std::vector<std::vector<std::string>> rows;
};

void RenderTable(const Table& table, ReportFormat format, std::string& out) {
  auto emit_row = [&](const std::vector<std::string>& cells) {
    if (format == ReportFormat::kTsv) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += '\t';
        out += cells[i];
      }
    } else {
      out += '|';
      for (const auto& cell : cells) {
        out += ' ';
        out += cell;
        out += " |";
      }
    }
    out += '\n';
  };

  emit_row(table.header);
  if (format == ReportFormat::kMarkdown) {
    out += '|';
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      out += i < table.label_columns ? " --- |" : " ---: |";
    }
    out += '\n';
  }
  for (const auto& row : table.rows) emit_row(row);
}

}  // namespace

Direction SettingDirection(PerturbationSetting setting) {
  return setting == PerturbationSetting::kOriginal ||
                 setting == PerturbationSetting::kPio
             ? Direction::kHigherBetter
             : Direction::kLowerBetter;
}

PredictionFile MakePredictions(const Dataset& dataset,
                               const ScoreMatrix& scores) {
  if (scores.rows.size() != dataset.size()) {
    throw ValidationError("score matrix has " +
                          std::to_string(scores.rows.size()) +
                          " rows for " + std::to_string(dataset.size()) +
                          " instances");
  }
  PredictionFile predictions;
  predictions.rows.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    predictions.rows.push_back({dataset.instances[i].id, scores.rows[i]});
  }
  return predictions;
}

void WritePredictions(const PredictionFile& predictions, std::ostream& out) {
  for (const auto& row : predictions.rows) {
    nlohmann::ordered_json object;
    object["id"] = row.id;
    object["scores"] = row.scores;
    out << internal::DumpCompact(object) << '\n';
  }
}

void SavePredictions(const PredictionFile& predictions,
                     const std::filesystem::path& path) {
  auto out = internal::OpenForWrite(path);
  WritePredictions(predictions, out);
  out.flush();
  internal::CheckWritten(out, path);
}

PredictionFile ReadPredictions(std::istream& in) {
  PredictionFile predictions;
  internal::ForEachJsonLine(
      in, [&](std::size_t line_number, const nlohmann::json& object) {
        internal::RejectUnknownKeys(object, {"id", "scores"}, line_number);
        PredictionRow row;
        row.id = internal::RequireString(object, "id", line_number);
        const auto& scores =
            internal::RequireField(object, "scores", line_number);
        if (!scores.is_array()) {
          throw ParseError(line_number, "field \"scores\" must be an array");
        }
        for (const auto& score : scores) {
          if (!score.is_number()) {
            throw ParseError(line_number, "scores must be numbers");
          }
          row.scores.push_back(score.get<double>());
        }
        predictions.rows.push_back(std::move(row));
      });
  return predictions;
}

PredictionFile LoadPredictions(const std::filesystem::path& path) {
  auto in = internal::OpenForRead(path);
  return ReadPredictions(in);
}

std::size_t PredictedOption(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

std::vector<std::size_t> AlignPredictions(const PredictionFile& predictions,
                                          const Dataset& gold) {
  std::unordered_map<std::string_view, const PredictionRow*> by_id;
  by_id.reserve(predictions.rows.size());
  for (const auto& row : predictions.rows) {
    if (!by_id.emplace(row.id, &row).second) {
      throw ValidationError("prediction id \"" + row.id + "\" is repeated");
    }
  }
  if (by_id.size() != gold.size()) {
    // Report one offending id, whichever side it is on.
    for (const auto& instance : gold.instances) {
      if (!by_id.contains(instance.id)) {
        throw ValidationError("no prediction for id \"" + instance.id + "\"");
      }
    }
    for (const auto& row : predictions.rows) {
      const bool known =
          std::any_of(gold.instances.begin(), gold.instances.end(),
                      [&](const McqaInstance& i) { return i.id == row.id; });
      if (!known) {
        throw ValidationError("prediction for unknown id \"" + row.id + "\"");
      }
    }
  }

  std::vector<std::size_t> predicted;
  predicted.reserve(gold.size());
  for (const auto& instance : gold.instances) {
    auto it = by_id.find(instance.id);
    if (it == by_id.end()) {
      throw ValidationError("no prediction for id \"" + instance.id + "\"");
    }
    const auto& scores = it->second->scores;
    if (scores.size() != instance.num_options()) {
      throw ValidationError("prediction for id \"" + instance.id + "\" has " +
                            std::to_string(scores.size()) + " scores, expected " +
                            std::to_string(instance.num_options()));
    }
    for (double s : scores) {
      if (!std::isfinite(s)) {
        throw ValidationError("prediction for id \"" + instance.id +
                              "\" has a non-finite score");
      }
    }
    predicted.push_back(PredictedOption(scores));
  }
  return predicted;
}

double Accuracy(const PredictionFile& predictions, const Dataset& gold) {
  const auto predicted = AlignPredictions(predictions, gold);
  if (gold.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    correct += predicted[i] == gold.instances[i].gold;
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(gold.size());
}

MonotonicityResult MonotonicityCheck(const PredictionFile& original,
                                     const PredictionFile& pio,
                                     const Dataset& gold,
                                     std::span<const PioChoice> pio_choices) {
  const auto before = AlignPredictions(original, gold);
  const auto after = AlignPredictions(pio, gold);

  std::vector<std::size_t> perturbed;
  if (!pio_choices.empty()) {
    std::unordered_map<std::string_view, std::size_t> choice_by_id;
    for (const auto& choice : pio_choices) {
      if (!choice_by_id.emplace(choice.instance_id,
                                choice.perturbed_option_index).second) {
        throw ValidationError("PIO choice for id \"" + choice.instance_id +
                              "\" is repeated");
      }
    }
    if (choice_by_id.size() != gold.size()) {
      throw ValidationError("PIO choices cover " +
                            std::to_string(choice_by_id.size()) + " ids, gold has " +
                            std::to_string(gold.size()));
    }
    for (const auto& instance : gold.instances) {
      auto it = choice_by_id.find(instance.id);
      if (it == choice_by_id.end()) {
        throw ValidationError("no PIO choice for id \"" + instance.id + "\"");
      }
      if (it->second == instance.gold ||
          it->second >= instance.num_options()) {
        throw ValidationError("PIO choice for id \"" + instance.id +
                              "\" is not an incorrect option");
      }
      perturbed.push_back(it->second);
    }
  }

  MonotonicityResult result;
  std::size_t echoes = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::size_t g = gold.instances[i].gold;
    if (before[i] == g && after[i] != g) {
      ++result.violations;
      if (!perturbed.empty() && after[i] == perturbed[i]) ++echoes;
    }
  }
  if (!gold.empty()) {
    result.violation_rate = 100.0 * static_cast<double>(result.violations) /
                            static_cast<double>(gold.size());
  }
  if (!perturbed.empty()) {
    result.echo_attraction_rate =
        result.violations == 0
            ? 0.0
            : 100.0 * static_cast<double>(echoes) /
                  static_cast<double>(result.violations);
  }
  return result;
}

double ChanceLevel(const Dataset& dataset) {
  if (dataset.empty()) return 0.0;
  double total = 0.0;
  for (const auto& instance : dataset.instances) {
    total += 100.0 / static_cast<double>(instance.num_options());
  }
  return total / static_cast<double>(dataset.size());
}

bool NoOptionApplicable(const Dataset& dataset) {
  for (const auto& instance : dataset.instances) {
    for (const auto& option : instance.options) {
      if (option.context != instance.options.front().context) return true;
    }
  }
  return false;
}

const SettingResult* EvalReport::Find(PerturbationSetting setting) const {
  for (const auto& result : settings) {
    if (result.setting == setting) return &result;
  }
  return nullptr;
}

bool EvalReport::HasDiagnostics() const {
  return monotonicity_violation_rate || echo_attraction_rate ||
         sanity_margin_no || sanity_margin_nq || reading_margin;
}

EvalReport ComplianceReport(const ComplianceInputs& inputs) {
  if (!inputs.accuracies.contains(PerturbationSetting::kOriginal)) {
    throw ValidationError("report needs the Original accuracy");
  }
  EvalReport report;
  report.dataset_name = inputs.dataset_name;
  report.model_name = inputs.model_name;

  for (auto setting : kAllSettings) {
    auto it = inputs.accuracies.find(setting);
    const bool not_applicable = setting == PerturbationSetting::kNo &&
                                !inputs.no_option_applicable;
    if (it == inputs.accuracies.end() && !not_applicable) continue;
    SettingResult result;
    result.setting = setting;
    result.direction = SettingDirection(setting);
    if (!not_applicable) {
      CheckPercentage(it->second, std::string(SettingLabel(setting)) +
                                      " accuracy");
      result.accuracy = it->second;
    }
    report.settings.push_back(result);
  }

  if (inputs.chance_level.has_value()) {
    CheckPercentage(*inputs.chance_level, "chance level");
    auto margin = [&](PerturbationSetting setting) -> std::optional<double> {
      const SettingResult* result = report.Find(setting);
      if (result == nullptr || !result->accuracy) return std::nullopt;
      return *result->accuracy - *inputs.chance_level;
    };
    report.sanity_margin_no = margin(PerturbationSetting::kNo);
    report.sanity_margin_nq = margin(PerturbationSetting::kNq);
    report.reading_margin = margin(PerturbationSetting::kNc);
  }
  if (inputs.monotonicity.has_value()) {
    CheckPercentage(inputs.monotonicity->violation_rate, "violation rate");
    report.monotonicity_violation_rate = inputs.monotonicity->violation_rate;
    report.echo_attraction_rate = inputs.monotonicity->echo_attraction_rate;
  }
  return report;
}

std::optional<ReportFormat> ParseReportFormat(std::string_view name) {
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  if (name == "tsv") return ReportFormat::kTsv;
  return std::nullopt;
}

std::string FormatOneDecimal(double value) {
  double rounded = std::round(value * 10.0) / 10.0;
  if (rounded == 0.0) rounded = 0.0;  // drop the sign of -0.0
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.1f", rounded);
  return buffer;
}

std::string RenderReports(std::span<const EvalReport> reports,
                          ReportFormat format) {
  std::vector<PerturbationSetting> columns;
  for (auto setting : kAllSettings) {
    const bool present = std::any_of(
        reports.begin(), reports.end(),
        [&](const EvalReport& r) { return r.Find(setting) != nullptr; });
    if (present) columns.push_back(setting);
  }

  Table accuracy;
  accuracy.header = {"Dataset", "Model"};
  accuracy.label_columns = 2;
  for (auto setting : columns) accuracy.header.push_back(ColumnHeader(setting));
  for (const auto& report : reports) {
    std::vector<std::string> row = {report.dataset_name, report.model_name};
    for (auto setting : columns) {
      const SettingResult* result = report.Find(setting);
      row.push_back(Cell(result ? result->accuracy : std::nullopt));
    }
    accuracy.rows.push_back(std::move(row));
  }

  std::string out;
  RenderTable(accuracy, format, out);

  const bool any_diagnostics =
      std::any_of(reports.begin(), reports.end(),
                  [](const EvalReport& r) { return r.HasDiagnostics(); });
  if (!any_diagnostics) return out;

  Table diagnostics;
  diagnostics.header = {"Dataset",
                        "Model",
                        "Monotonicity violations (%)",
                        "Echo attraction (%)",
                        "Sanity margin NO",
                        "Sanity margin NQ",
                        "Reading margin NC"};
  diagnostics.label_columns = 2;
  for (const auto& report : reports) {
    diagnostics.rows.push_back({report.dataset_name, report.model_name,
                                Cell(report.monotonicity_violation_rate),
                                Cell(report.echo_attraction_rate),
                                Cell(report.sanity_margin_no),
                                Cell(report.sanity_margin_nq),
                                Cell(report.reading_margin)});
  }
  out += '\n';
  RenderTable(diagnostics, format, out);
  return out;
}

std::string RenderReport(const EvalReport& report, ReportFormat format) {
  return RenderReports(std::span<const EvalReport>(&report, 1), format);
}

EvaluationRun Evaluate(const Scorer& scorer, const Dataset& dataset,
                       std::uint64_t seed, std::string dataset_name,
                       std::string model_name,
                       std::span<const PerturbationSetting> settings) {
  EvaluationRun run;
  ComplianceInputs inputs;
  inputs.dataset_name = std::move(dataset_name);
  inputs.model_name = std::move(model_name);
  inputs.chance_level = ChanceLevel(dataset);
  inputs.no_option_applicable = NoOptionApplicable(dataset);

  auto wanted = [&](PerturbationSetting s) {
    return s == PerturbationSetting::kOriginal ||
           std::find(settings.begin(), settings.end(), s) != settings.end();
  };
  for (auto setting : kAllSettings) {
    if (!wanted(setting)) continue;
    if (setting == PerturbationSetting::kNo && !inputs.no_option_applicable) {
      continue;
    }
    Dataset perturbed;
    if (setting == PerturbationSetting::kPio) {
      PioResult pio = PerturbPio(dataset, seed);
      perturbed = std::move(pio.dataset);
      run.pio_choices = std::move(pio.choices);
    } else {
      perturbed = ApplySetting(dataset, setting, seed);
    }
    PredictionFile predictions =
        MakePredictions(perturbed, scorer.ScoreDataset(perturbed));
    inputs.accuracies[setting] = Accuracy(predictions, dataset);
    run.predictions.emplace(setting, std::move(predictions));
  }
  if (run.predictions.contains(PerturbationSetting::kPio)) {
    inputs.monotonicity = MonotonicityCheck(
        run.predictions.at(PerturbationSetting::kOriginal),
        run.predictions.at(PerturbationSetting::kPio), dataset,
        run.pio_choices);
  }
  run.report = ComplianceReport(inputs);
  if (!inputs.no_option_applicable && !wanted(PerturbationSetting::kNo)) {
    std::erase_if(run.report.settings, [](const SettingResult& r) {
      return r.setting == PerturbationSetting::kNo;
    });
  }
  return run;
}

}  // namespace mcqa_probe
