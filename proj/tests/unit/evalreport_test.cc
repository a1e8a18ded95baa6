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

#include <cmath>
#include <random>
#include <sstream>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "mcqa_probe/errors.h"
#include "mcqa_probe/train.h"
#include "testing.h"

namespace mcqa_probe {
namespace {

using ::testing::HasSubstr;
using S = PerturbationSetting;

Dataset FourWay(std::size_t n, std::mt19937_64& rng) {
  Dataset d;
  std::uniform_int_distribution<std::size_t> gold(0, 3);
  for (std::size_t i = 0; i < n; ++i) {
    d.instances.push_back({"g" + std::to_string(i), "q",
                           {{"a", "1"}, {"b", "2"}, {"c", "3"}, {"d", "4"}},
                           gold(rng)});
  }
  return d;
}

PredictionFile OneHot(const Dataset& d, const std::vector<std::size_t>& picks) {
  PredictionFile p;
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::vector<double> scores(d.instances[i].num_options(), 0.0);
    scores[picks[i]] = 1.0;
    p.rows.push_back({d.instances[i].id, scores});
  }
  return p;
}

std::vector<std::size_t> Golds(const Dataset& d) {
  std::vector<std::size_t> out;
  for (const auto& inst : d.instances) out.push_back(inst.gold);
  return out;
}

TEST(PredictedOptionTest, TiesGoToLowestIndex) {
  EXPECT_EQ(PredictedOption(std::vector<double>{1, 3, 3, 2}), 1u);
  EXPECT_EQ(PredictedOption(std::vector<double>{0, 0, 0}), 0u);
}

TEST(AccuracyTest, PerfectPredictions) {
  std::mt19937_64 rng(1);
  const Dataset d = FourWay(50, rng);
  EXPECT_EQ(Accuracy(OneHot(d, Golds(d)), d), 100.0);
}

TEST(AccuracyTest, AllZeroScoresCountGoldZero) {
  std::mt19937_64 rng(2);
  const Dataset d = FourWay(400, rng);
  PredictionFile zeros;
  std::size_t gold_zero = 0;
  for (const auto& inst : d.instances) {
    zeros.rows.push_back({inst.id, std::vector<double>(4, 0.0)});
    gold_zero += inst.gold == 0;
  }
  EXPECT_DOUBLE_EQ(Accuracy(zeros, d), 100.0 * gold_zero / 400.0);
}

TEST(AccuracyTest, RandomScoresNearChance) {
  std::mt19937_64 rng(3);
  const Dataset d = FourWay(10000, rng);
  std::normal_distribution<double> normal;
  PredictionFile p;
  for (const auto& inst : d.instances) {
    p.rows.push_back({inst.id, {normal(rng), normal(rng), normal(rng), normal(rng)}});
  }
  // 3 sigma of a binomial proportion at n = 10000 is 1.3 points.
  EXPECT_NEAR(Accuracy(p, d), ChanceLevel(d), 1.5);
}

TEST(AccuracyTest, ShiftingRowsKeepsPredictions) {
  std::mt19937_64 rng(4);
  const Dataset d = FourWay(300, rng);
  std::normal_distribution<double> normal;
  PredictionFile p;
  for (const auto& inst : d.instances) {
    p.rows.push_back({inst.id, {normal(rng), normal(rng), normal(rng), normal(rng)}});
  }
  PredictionFile shifted = p;
  for (auto& row : shifted.rows) {
    const double c = normal(rng) * 10;
    for (double& s : row.scores) s += c;
  }
  EXPECT_EQ(AlignPredictions(p, d), AlignPredictions(shifted, d));
  EXPECT_EQ(Accuracy(p, d), Accuracy(shifted, d));
}

TEST(AlignPredictionsTest, OrderIndependent) {
  std::mt19937_64 rng(5);
  const Dataset d = FourWay(20, rng);
  PredictionFile p = OneHot(d, Golds(d));
  std::reverse(p.rows.begin(), p.rows.end());
  EXPECT_EQ(AlignPredictions(p, d), Golds(d));
}

TEST(AlignPredictionsTest, MismatchesNameTheId) {
  std::mt19937_64 rng(6);
  const Dataset d = FourWay(5, rng);
  auto expect_error = [&](const PredictionFile& p, const std::string& id) {
    try {
      AlignPredictions(p, d);
      ADD_FAILURE() << "expected ValidationError";
    } catch (const ValidationError& e) {
      EXPECT_THAT(e.what(), HasSubstr(id));
    }
  };
  PredictionFile missing = OneHot(d, Golds(d));
  missing.rows.erase(missing.rows.begin() + 2);
  expect_error(missing, "g2");

  PredictionFile extra = OneHot(d, Golds(d));
  extra.rows.push_back({"zz", {1, 2, 3, 4}});
  expect_error(extra, "zz");

  PredictionFile duplicate = OneHot(d, Golds(d));
  duplicate.rows[4].id = "g1";
  expect_error(duplicate, "g1");

  PredictionFile short_row = OneHot(d, Golds(d));
  short_row.rows[3].scores.pop_back();
  expect_error(short_row, "g3");

  PredictionFile nan_row = OneHot(d, Golds(d));
  nan_row.rows[0].scores[1] = std::nan("");
  expect_error(nan_row, "g0");
}

TEST(MonotonicityCheckTest, IdenticalPredictionsNeverViolate) {
  std::mt19937_64 rng(7);
  const Dataset d = FourWay(100, rng);
  std::uniform_int_distribution<std::size_t> pick(0, 3);
  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < d.size(); ++i) picks.push_back(pick(rng));
  const PredictionFile p = OneHot(d, picks);
  const auto result = MonotonicityCheck(p, p, d, {});
  EXPECT_EQ(result.violation_rate, 0.0);
  EXPECT_EQ(result.violations, 0u);
  EXPECT_FALSE(result.echo_attraction_rate.has_value());
}

TEST(MonotonicityCheckTest, AllSwitchedToEcho) {
  std::mt19937_64 rng(8);
  const Dataset d = FourWay(60, rng);
  const PioResult pio = PerturbPio(d, 1);
  std::vector<std::size_t> echo;
  for (const auto& c : pio.choices) echo.push_back(c.perturbed_option_index);
  const auto result =
      MonotonicityCheck(OneHot(d, Golds(d)), OneHot(d, echo), d, pio.choices);
  EXPECT_EQ(result.violation_rate, 100.0);
  EXPECT_EQ(result.echo_attraction_rate, 100.0);
}

TEST(MonotonicityCheckTest, PartialViolations) {
  std::mt19937_64 rng(9);
  const Dataset d = FourWay(4, rng);
  std::vector<PioChoice> choices;
  for (const auto& inst : d.instances) {
    choices.push_back({inst.id, (inst.gold + 1) % 4});
  }
  std::vector<std::size_t> after = Golds(d);
  after[0] = choices[0].perturbed_option_index;  // echo violation
  after[1] = (d.instances[1].gold + 2) % 4;      // other violation
  const auto result =
      MonotonicityCheck(OneHot(d, Golds(d)), OneHot(d, after), d, choices);
  EXPECT_EQ(result.violations, 2u);
  EXPECT_EQ(result.violation_rate, 50.0);
  EXPECT_EQ(result.echo_attraction_rate, 50.0);
}

TEST(MonotonicityCheckTest, RejectsChoiceOnGold) {
  std::mt19937_64 rng(10);
  const Dataset d = FourWay(3, rng);
  std::vector<PioChoice> choices;
  for (const auto& inst : d.instances) choices.push_back({inst.id, inst.gold});
  const PredictionFile p = OneHot(d, Golds(d));
  EXPECT_THROW(MonotonicityCheck(p, p, d, choices), ValidationError);
}

TEST(ChanceLevelTest, MixedK) {
  Dataset d;
  d.instances.push_back({"a", "q", std::vector<OptionEntry>(2, {"x", "c"}), 0});
  d.instances.push_back({"b", "q", std::vector<OptionEntry>(4, {"x", "c"}), 0});
  EXPECT_DOUBLE_EQ(ChanceLevel(d), 37.5);
  EXPECT_FALSE(NoOptionApplicable(d));
  d.instances[1].options[3].context = "other";
  EXPECT_TRUE(NoOptionApplicable(d));
}

TEST(FormatOneDecimalTest, RoundsHalfAwayFromZero) {
  EXPECT_EQ(FormatOneDecimal(78.3), "78.3");
  EXPECT_EQ(FormatOneDecimal(2.25), "2.3");
  EXPECT_EQ(FormatOneDecimal(-2.25), "-2.3");
  EXPECT_EQ(FormatOneDecimal(0.04), "0.0");
  EXPECT_EQ(FormatOneDecimal(-0.04), "0.0");
  EXPECT_EQ(FormatOneDecimal(100.0), "100.0");
  EXPECT_EQ(FormatOneDecimal(99.96), "100.0");
}

ComplianceInputs AristoBaseline() {
  ComplianceInputs inputs;
  inputs.dataset_name = "ARISTO";
  inputs.model_name = "RoBERTa";
  inputs.accuracies = {{S::kOriginal, 78.3}, {S::kPio, 25.4}, {S::kNo, 46.8},
                       {S::kNq, 55.3},       {S::kNc, 63.8}};
  return inputs;
}

TEST(ComplianceReportTest, DirectionsAndMargins) {
  ComplianceInputs inputs = AristoBaseline();
  inputs.chance_level = 25.0;
  const EvalReport report = ComplianceReport(inputs);
  ASSERT_EQ(report.settings.size(), 5u);
  EXPECT_EQ(report.Find(S::kOriginal)->direction, Direction::kHigherBetter);
  EXPECT_EQ(report.Find(S::kPio)->direction, Direction::kHigherBetter);
  EXPECT_EQ(report.Find(S::kNo)->direction, Direction::kLowerBetter);
  EXPECT_EQ(report.Find(S::kNq)->direction, Direction::kLowerBetter);
  EXPECT_EQ(report.Find(S::kNc)->direction, Direction::kLowerBetter);
  EXPECT_NEAR(*report.sanity_margin_no, 21.8, 1e-12);
  EXPECT_NEAR(*report.sanity_margin_nq, 30.3, 1e-12);
  EXPECT_NEAR(*report.reading_margin, 38.8, 1e-12);
}

TEST(ComplianceReportTest, Validation) {
  ComplianceInputs inputs;
  EXPECT_THROW(ComplianceReport(inputs), ValidationError);
  inputs.accuracies[S::kOriginal] = 101.0;
  EXPECT_THROW(ComplianceReport(inputs), ValidationError);
  inputs.accuracies[S::kOriginal] = 50.0;
  inputs.accuracies[S::kNc] = -1.0;
  EXPECT_THROW(ComplianceReport(inputs), ValidationError);
}

TEST(RenderReportTest, AristoRowWithArrows) {
  const EvalReport report = ComplianceReport(AristoBaseline());
  EXPECT_EQ(RenderReport(report, ReportFormat::kMarkdown),
            "| Dataset | Model | O (↑) | PIO (↑) | NO (↓) | NQ (↓) | NC (↓) |\n"
            "| --- | --- | ---: | ---: | ---: | ---: | ---: |\n"
            "| ARISTO | RoBERTa | 78.3 | 25.4 | 46.8 | 55.3 | 63.8 |\n");
  EXPECT_EQ(RenderReport(report, ReportFormat::kTsv),
            "Dataset\tModel\tO (↑)\tPIO (↑)\tNO (↓)\tNQ (↓)\tNC (↓)\n"
            "ARISTO\tRoBERTa\t78.3\t25.4\t46.8\t55.3\t63.8\n");
}

TEST(RenderReportTest, NotApplicableNoRendersDash) {
  ComplianceInputs inputs;
  inputs.dataset_name = "RACE";
  inputs.model_name = "RoBERTa";
  inputs.accuracies = {{S::kOriginal, 84.8}, {S::kPio, 45.8}, {S::kNq, 62.8},
                       {S::kNc, 49.1}};
  inputs.no_option_applicable = false;
  EXPECT_EQ(RenderReport(ComplianceReport(inputs), ReportFormat::kTsv),
            "Dataset\tModel\tO (↑)\tPIO (↑)\tNO (↓)\tNQ (↓)\tNC (↓)\n"
            "RACE\tRoBERTa\t84.8\t45.8\t−\t62.8\t49.1\n");
}

TEST(RenderReportTest, OriginalOnly) {
  ComplianceInputs inputs;
  inputs.dataset_name = "d";
  inputs.model_name = "m";
  inputs.accuracies = {{S::kOriginal, 12.34}};
  EXPECT_EQ(RenderReport(ComplianceReport(inputs), ReportFormat::kMarkdown),
            "| Dataset | Model | O (↑) |\n| --- | --- | ---: |\n| d | m | 12.3 |\n");
}

TEST(RenderReportTest, DiagnosticsTable) {
  ComplianceInputs inputs = AristoBaseline();
  inputs.chance_level = 25.0;
  inputs.monotonicity = MonotonicityResult{12.0, 3, std::nullopt};
  EXPECT_EQ(RenderReport(ComplianceReport(inputs), ReportFormat::kTsv),
            "Dataset\tModel\tO (↑)\tPIO (↑)\tNO (↓)\tNQ (↓)\tNC (↓)\n"
            "ARISTO\tRoBERTa\t78.3\t25.4\t46.8\t55.3\t63.8\n"
            "\n"
            "Dataset\tModel\tMonotonicity violations (%)\tEcho attraction (%)\t"
            "Sanity margin NO\tSanity margin NQ\tReading margin NC\n"
            "ARISTO\tRoBERTa\t12.0\t−\t21.8\t30.3\t38.8\n");
}

TEST(RenderReportTest, FormatsShareCells) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pct(0.0, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    ComplianceInputs inputs;
    inputs.dataset_name = "d";
    inputs.model_name = "m";
    for (auto s : kAllSettings) inputs.accuracies[s] = pct(rng);
    const EvalReport report = ComplianceReport(inputs);
    const std::string md = RenderReport(report, ReportFormat::kMarkdown);
    const std::string tsv = RenderReport(report, ReportFormat::kTsv);
    std::istringstream tsv_lines(tsv);
    std::string header, row;
    std::getline(tsv_lines, header);
    std::getline(tsv_lines, row);
    std::string from_md = md.substr(md.rfind("| d |"));
    from_md = from_md.substr(2, from_md.size() - 5);  // strip "| " and " |\n"
    std::string converted;
    for (std::size_t pos = 0; pos < from_md.size();) {
      const std::size_t bar = from_md.find(" | ", pos);
      converted += from_md.substr(pos, bar - pos);
      if (bar == std::string::npos) break;
      converted += '\t';
      pos = bar + 3;
    }
    EXPECT_EQ(converted, row);
    EXPECT_EQ(RenderReport(report, ReportFormat::kMarkdown), md);
  }
}

TEST(PredictionIoTest, RoundTrip) {
  PredictionFile p;
  p.rows.push_back({"a", {0.1, -2.5, 1e-300}});
  p.rows.push_back({"b/c", {3.0, 4.0}});
  std::ostringstream out;
  WritePredictions(p, out);
  std::istringstream in(out.str());
  EXPECT_EQ(ReadPredictions(in), p);
  EXPECT_THAT(out.str(), HasSubstr("{\"id\":\"a\",\"scores\":["));
}

TEST(PredictionIoTest, Malformed) {
  std::istringstream bad_scores("{\"id\":\"a\",\"scores\":[\"x\"]}\n");
  EXPECT_THROW(ReadPredictions(bad_scores), ParseError);
  std::istringstream bad_json("{\"id\":\"a\",\n");
  EXPECT_THROW(ReadPredictions(bad_json), ParseError);
  std::istringstream overflow("{\"id\":\"a\",\"scores\":[1e999]}\n");
  EXPECT_THROW(ReadPredictions(overflow), ParseError);
}

TEST(EvaluateTest, LexicalScorerFailsMonotonicityOnSeparableCorpus) {
  const Dataset train = testing::SeparableCorpus(400, 4, 1);
  const Dataset eval = testing::SeparableCorpus(400, 4, 2);
  TrainConfig config;
  config.loss = LossKind::kMulticlass;
  const TrainRecord record = Train(train, config);
  const EvaluationRun run = Evaluate(record.model, eval, 5, "synthetic", "lex");
  EXPECT_GE(*run.report.Find(S::kOriginal)->accuracy, 95.0);
  EXPECT_GT(*run.report.monotonicity_violation_rate, 50.0);
  EXPECT_NEAR(*run.report.Find(S::kNc)->accuracy, 25.0, 5.0);
  EXPECT_EQ(run.predictions.size(), 5u);
  EXPECT_EQ(run.pio_choices.size(), eval.size());
}

TEST(EvaluateTest, SharedContextMarksNoNotApplicable) {
  Dataset d;
  d.instances.push_back({"r", "q", {{"a", "p"}, {"b", "p"}, {"c", "p"}}, 1});
  const EvaluationRun run = Evaluate(LinearScorer(), d, 0, "race", "m");
  ASSERT_NE(run.report.Find(S::kNo), nullptr);
  EXPECT_FALSE(run.report.Find(S::kNo)->accuracy.has_value());
  EXPECT_FALSE(run.report.sanity_margin_no.has_value());
}

}  // namespace
}  // namespace mcqa_probe
