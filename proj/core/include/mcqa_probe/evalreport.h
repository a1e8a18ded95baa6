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

#ifndef MCQA_PROBE_EVALREPORT_H_
#define MCQA_PROBE_EVALREPORT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcqa_probe/dataset.h"
#include "mcqa_probe/perturb.h"
#include "mcqa_probe/scorer.h"

namespace mcqa_probe {

enum class Direction { kHigherBetter, kLowerBetter };

// O and PIO should stay high; NO, NQ and NC should fall to chance.
Direction SettingDirection(PerturbationSetting setting);

// Rendered in place of an accuracy that does not apply or was not measured.
inline constexpr std::string_view kMissingCell = "−";

struct PredictionRow {
  std::string id;
  std::vector<double> scores;

  friend bool operator==(const PredictionRow&, const PredictionRow&) = default;
};

// Line-delimited JSON: {"id": ..., "scores": [...]} per instance.
struct PredictionFile {
  std::vector<PredictionRow> rows;

  friend bool operator==(const PredictionFile&,
                         const PredictionFile&) = default;
};

PredictionFile MakePredictions(const Dataset& dataset,
                               const ScoreMatrix& scores);
void WritePredictions(const PredictionFile& predictions, std::ostream& out);
void SavePredictions(const PredictionFile& predictions,
                     const std::filesystem::path& path);
PredictionFile ReadPredictions(std::istream& in);
PredictionFile LoadPredictions(const std::filesystem::path& path);

// Index of the largest score; ties go to the lowest index.
std::size_t PredictedOption(std::span<const double> scores);

// Predicted option for every gold instance, in gold order. Throws
// ValidationError naming the id when the id sets differ, an id repeats, a
// row length differs from k, or a score is not finite.
std::vector<std::size_t> AlignPredictions(const PredictionFile& predictions,
                                          const Dataset& gold);

// Percentage of instances whose predicted option is gold (unrounded).
double Accuracy(const PredictionFile& predictions, const Dataset& gold);

struct MonotonicityResult {
  // Instances right under Original but wrong under PIO, as a percentage of
  // all instances.
  double violation_rate = 0.0;
  std::size_t violations = 0;
  // Share of violations that picked the question-echo option; needs the
  // PIO audit choices.
  std::optional<double> echo_attraction_rate;
};

// `pio_choices` may be empty, in which case echo attraction is not computed.
MonotonicityResult MonotonicityCheck(const PredictionFile& original,
                                     const PredictionFile& pio,
                                     const Dataset& gold,
                                     std::span<const PioChoice> pio_choices);

// Expected accuracy of a uniform guess: mean over instances of 100 / k.
double ChanceLevel(const Dataset& dataset);

// False when every instance shares one context across its options, so that
// blanking the option texts leaves the options indistinguishable.
bool NoOptionApplicable(const Dataset& dataset);

struct SettingResult {
  PerturbationSetting setting = PerturbationSetting::kOriginal;
  std::optional<double> accuracy;  // nullopt: not applicable
  Direction direction = Direction::kHigherBetter;
};

struct EvalReport {
  std::string dataset_name;
  std::string model_name;
  std::vector<SettingResult> settings;  // canonical O, PIO, NO, NQ, NC order
  std::optional<double> monotonicity_violation_rate;
  std::optional<double> echo_attraction_rate;
  // Accuracy minus chance level.
  std::optional<double> sanity_margin_no;
  std::optional<double> sanity_margin_nq;
  std::optional<double> reading_margin;

  const SettingResult* Find(PerturbationSetting setting) const;
  bool HasDiagnostics() const;
};

struct ComplianceInputs {
  std::string dataset_name;
  std::string model_name;
  std::map<PerturbationSetting, double> accuracies;  // must contain Original
  std::optional<double> chance_level;  // margins need it
  bool no_option_applicable = true;
  std::optional<MonotonicityResult> monotonicity;
};

// Throws ValidationError when Original is missing or a percentage lies
// outside [0, 100].
EvalReport ComplianceReport(const ComplianceInputs& inputs);

enum class ReportFormat { kMarkdown, kTsv };
std::optional<ReportFormat> ParseReportFormat(std::string_view name);

// One decimal, half away from zero; never renders "-0.0".
std::string FormatOneDecimal(double value);

// Accuracy table with columns Dataset, Model, then the settings present in
// any report (O, PIO, NO, NQ, NC order), followed by a diagnostics table
// when any report carries one.
std::string RenderReports(std::span<const EvalReport> reports,
                          ReportFormat format);
std::string RenderReport(const EvalReport& report, ReportFormat format);

// Scores `dataset` under each requested setting, perturbing with `seed`,
// and assembles the report.
struct EvaluationRun {
  EvalReport report;
  std::map<PerturbationSetting, PredictionFile> predictions;
  std::vector<PioChoice> pio_choices;
};

EvaluationRun Evaluate(const Scorer& scorer, const Dataset& dataset,
                       std::uint64_t seed, std::string dataset_name,
                       std::string model_name,
                       std::span<const PerturbationSetting> settings =
                           kAllSettings);

}  // namespace mcqa_probe

#endif  // MCQA_PROBE_EVALREPORT_H_
