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

#include "cli.h"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "mcqa_probe/augment.h"
#include "mcqa_probe/dataset.h"
#include "mcqa_probe/errors.h"
#include "mcqa_probe/evalreport.h"
#include "mcqa_probe/perturb.h"
#include "mcqa_probe/remote.h"
#include "mcqa_probe/scorer.h"
#include "mcqa_probe/train.h"

namespace mcqa_probe::cli {
namespace {

constexpr const char* kStdio = "-";
constexpr const char* kTimeoutEnv = "MCQA_PROBE_REMOTE_TIMEOUT_MS";

// Thrown for flag combinations CLI11 cannot express.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  bool stdin_used = false;
};

std::string ReadAll(const std::string& path, Io& io) {
  std::ostringstream buffer;
  if (path == kStdio) {
    if (io.stdin_used) throw UsageError("stdin (\"-\") can only be read once");
    io.stdin_used = true;
    buffer << io.in.rdbuf();
  } else {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open for reading: " + path);
    buffer << file.rdbuf();
  }
  return buffer.str();
}

Dataset ReadDatasetArg(const std::string& path, Io& io) {
  std::istringstream stream(ReadAll(path, io));
  return ReadDataset(stream, path == kStdio ? "stdin" : path);
}

PredictionFile ReadPredictionsArg(const std::string& path, Io& io) {
  std::istringstream stream(ReadAll(path, io));
  return ReadPredictions(stream);
}

// Outputs are buffered until every input has been validated.
class PendingOutputs {
 public:
  void Add(std::string path, std::string content) {
    files_.emplace_back(std::move(path), std::move(content));
  }

  void Commit(Io& io) const {
    for (const auto& [path, content] : files_) {
      if (path == kStdio) {
        io.out << content;
        io.out.flush();
        continue;
      }
      std::ofstream file(path, std::ios::binary | std::ios::trunc);
      if (!file) throw IoError("cannot open for writing: " + path);
      file << content;
      file.flush();
      if (!file) throw IoError("write failed: " + path);
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string StemOf(const std::string& path, const char* fallback) {
  if (path == kStdio) return fallback;
  return std::filesystem::path(path).stem().string();
}

std::chrono::milliseconds RemoteTimeout() {
  const char* raw = std::getenv(kTimeoutEnv);
  if (raw == nullptr || *raw == '\0') return kDefaultRemoteTimeout;
  char* end = nullptr;
  const long long ms = std::strtoll(raw, &end, 10);
  if (*end != '\0' || ms <= 0) {
    throw UsageError(std::string(kTimeoutEnv) +
                     " must be a positive integer, got \"" + raw + "\"");
  }
  return std::chrono::milliseconds(ms);
}

template <typename T>
std::string Dump(const T& value, void (*writer)(const T&, std::ostream&)) {
  std::ostringstream out;
  writer(value, out);
  return out.str();
}

// --- subcommands -----------------------------------------------------------

struct PerturbOptions {
  std::string setting;
  std::string in;
  std::string out;
  std::string choices;
  std::optional<std::uint64_t> seed;
};

int RunPerturb(const PerturbOptions& opts, Io& io) {
  const auto setting = ParseSetting(opts.setting);
  if (!setting) throw UsageError("unknown setting: " + opts.setting);
  if (*setting == PerturbationSetting::kPio && !opts.seed) {
    throw UsageError("--setting pio requires --seed");
  }
  if (*setting != PerturbationSetting::kPio && !opts.choices.empty()) {
    throw UsageError("--choices only applies to --setting pio");
  }
  const Dataset dataset = ReadDatasetArg(opts.in, io);

  PendingOutputs outputs;
  std::ostringstream data;
  if (*setting == PerturbationSetting::kPio) {
    const PioResult result = PerturbPio(dataset, *opts.seed);
    WriteDataset(result.dataset, data);
    if (!opts.choices.empty()) {
      std::ostringstream choices;
      WritePioChoices(result.choices, choices);
      outputs.Add(opts.choices, choices.str());
    }
  } else {
    WriteDataset(ApplySetting(dataset, *setting, 0), data);
  }
  outputs.Add(opts.out, data.str());
  outputs.Commit(io);
  return kExitOk;
}

struct AugmentOptions {
  std::string in;
  std::string out;
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  double p_correct = 0.2;
  double p_incorrect = 0.8;
};

int RunAugment(const AugmentOptions& opts, Io& io) {
  AugmentConfig config{opts.p_correct, opts.p_incorrect, opts.seed};
  config.Validate();
  const Dataset dataset = ReadDatasetArg(opts.in, io);
  std::ostringstream out;
  WriteTriplets(AugmentEpoch(dataset, config, opts.epoch), out);
  PendingOutputs outputs;
  outputs.Add(opts.out, out.str());
  outputs.Commit(io);
  return kExitOk;
}

struct TrainOptions {
  std::string loss;
  bool augment = false;
  double p_correct = 0.2;
  double p_incorrect = 0.8;
  std::size_t augment_start_epoch = 0;
  std::optional<std::size_t> epochs;
  double lr = 0.1;
  std::uint64_t seed = 0;
  std::string in;
  std::string model_out;
  std::string log_out;
};

int RunTrain(const TrainOptions& opts, Io& io) {
  TrainConfig config;
  const auto loss = ParseLoss(opts.loss);
  if (!loss) throw UsageError("unknown loss: " + opts.loss);
  config.loss = *loss;
  config.learning_rate = opts.lr;
  config.seed = opts.seed;
  config.augment_start_epoch = opts.augment_start_epoch;
  if (opts.augment) {
    config.augment = AugmentConfig{opts.p_correct, opts.p_incorrect, opts.seed};
  }
  config.epochs = opts.epochs.value_or(opts.augment ? kDefaultAugmentedEpochs
                                                    : kDefaultEpochs);
  config.Validate();
  const Dataset dataset = ReadDatasetArg(opts.in, io);
  const TrainRecord record = Train(dataset, config);

  std::ostringstream log;
  WriteTrainLog(record.epoch_losses, log);
  PendingOutputs outputs;
  outputs.Add(opts.model_out, SerializeModel(record.model));
  if (opts.log_out.empty()) {
    io.err << log.str();
  } else {
    outputs.Add(opts.log_out, log.str());
  }
  outputs.Commit(io);
  return kExitOk;
}

struct ScorerOptions {
  std::string model;
  std::string remote;
  std::size_t batch_size = 64;
  std::size_t workers = 1;
};

std::unique_ptr<Scorer> MakeScorer(const ScorerOptions& opts, Io& io) {
  if (opts.model.empty() == opts.remote.empty()) {
    throw UsageError("exactly one of --model and --remote is required");
  }
  if (!opts.remote.empty()) {
    RemoteScorerConfig config;
    config.endpoint_url = opts.remote;
    config.batch_size = opts.batch_size;
    config.workers = opts.workers;
    config.timeout = RemoteTimeout();
    return std::make_unique<RemoteScorer>(config);
  }
  return std::make_unique<LinearScorer>(ParseModel(ReadAll(opts.model, io)));
}

std::string ScorerName(const ScorerOptions& opts) {
  return opts.model.empty() ? opts.remote : StemOf(opts.model, "model");
}

struct ScoreOptions {
  ScorerOptions scorer;
  std::string in;
  std::string out;
};

int RunScore(const ScoreOptions& opts, Io& io) {
  const auto scorer = MakeScorer(opts.scorer, io);
  const Dataset dataset = ReadDatasetArg(opts.in, io);
  ScoreMatrix scores;
  if (const auto* linear = dynamic_cast<const LinearScorer*>(scorer.get())) {
    scores = linear->ScoreDataset(dataset, opts.scorer.workers);
  } else {
    scores = scorer->ScoreDataset(dataset);
  }
  PendingOutputs outputs;
  outputs.Add(opts.out, Dump(MakePredictions(dataset, scores),
                             &WritePredictions));
  outputs.Commit(io);
  return kExitOk;
}

struct EvaluateOptions {
  ScorerOptions scorer;
  std::string in;
  std::uint64_t seed = 0;
  std::string format = "markdown";
  std::string out = kStdio;
  std::string model_name;
  std::string dataset_name;
  std::string predictions_dir;
};

int RunEvaluate(const EvaluateOptions& opts, Io& io) {
  const auto format = ParseReportFormat(opts.format);
  if (!format) throw UsageError("unknown format: " + opts.format);
  const auto scorer = MakeScorer(opts.scorer, io);
  const Dataset dataset = ReadDatasetArg(opts.in, io);
  const EvaluationRun run = Evaluate(
      *scorer, dataset, opts.seed,
      opts.dataset_name.empty() ? StemOf(opts.in, "stdin") : opts.dataset_name,
      opts.model_name.empty() ? ScorerName(opts.scorer) : opts.model_name);

  PendingOutputs outputs;
  if (!opts.predictions_dir.empty()) {
    std::filesystem::create_directories(opts.predictions_dir);
    const std::filesystem::path dir(opts.predictions_dir);
    for (const auto& [setting, predictions] : run.predictions) {
      outputs.Add((dir / (std::string(SettingName(setting)) + ".jsonl")).string(),
                  Dump(predictions, &WritePredictions));
    }
    std::ostringstream choices;
    WritePioChoices(run.pio_choices, choices);
    outputs.Add((dir / "pio.choices.jsonl").string(), choices.str());
  }
  outputs.Add(opts.out, RenderReport(run.report, *format));
  outputs.Commit(io);
  return kExitOk;
}

struct ReportOptions {
  std::string gold;
  std::map<PerturbationSetting, std::string> predictions;
  std::string pio_choices;
  std::string format = "markdown";
  std::string out = kStdio;
  std::string model_name = "model";
  std::string dataset_name;
};

int RunReport(const ReportOptions& opts, Io& io) {
  const auto format = ParseReportFormat(opts.format);
  if (!format) throw UsageError("unknown format: " + opts.format);
  if (!opts.pio_choices.empty() &&
      !opts.predictions.contains(PerturbationSetting::kPio)) {
    throw UsageError("--pio-choices requires --pio");
  }
  const Dataset gold = ReadDatasetArg(opts.gold, io);

  ComplianceInputs inputs;
  inputs.dataset_name =
      opts.dataset_name.empty() ? StemOf(opts.gold, "stdin") : opts.dataset_name;
  inputs.model_name = opts.model_name;
  inputs.chance_level = ChanceLevel(gold);
  inputs.no_option_applicable = NoOptionApplicable(gold);

  std::map<PerturbationSetting, PredictionFile> loaded;
  for (const auto& [setting, path] : opts.predictions) {
    loaded.emplace(setting, ReadPredictionsArg(path, io));
    const double accuracy = Accuracy(loaded.at(setting), gold);
    if (setting == PerturbationSetting::kNo && !inputs.no_option_applicable) {
      io.err << "note: No Option is not applicable to " << inputs.dataset_name
             << " (options share one context); ignoring --no\n";
      continue;
    }
    inputs.accuracies[setting] = accuracy;
  }
  if (loaded.contains(PerturbationSetting::kPio)) {
    std::vector<PioChoice> choices;
    if (!opts.pio_choices.empty()) {
      std::istringstream stream(ReadAll(opts.pio_choices, io));
      choices = ReadPioChoices(stream);
    }
    inputs.monotonicity =
        MonotonicityCheck(loaded.at(PerturbationSetting::kOriginal),
                          loaded.at(PerturbationSetting::kPio), gold, choices);
  }

  PendingOutputs outputs;
  outputs.Add(opts.out, RenderReport(ComplianceReport(inputs), *format));
  outputs.Commit(io);
  return kExitOk;
}

void AddScorerFlags(CLI::App* command, ScorerOptions& opts) {
  auto* model = command->add_option("--model", opts.model,
                                    "Linear model file (mcqa-probe-linear-v1)");
  auto* remote = command->add_option("--remote", opts.remote,
                                     "Remote scorer base URL (http://...)");
  model->excludes(remote);
  command->add_option("--batch-size", opts.batch_size, "Items per remote request")
      ->check(CLI::PositiveNumber)
      ->needs(remote);
  command->add_option("--workers", opts.workers,
                      "Concurrent remote batches (or local scoring threads)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int Run(std::span<const std::string> args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  CLI::App app{"Expectation probes, augmentation and reference scorers for "
               "multiple-choice QA datasets",
               "mcqa_probe"};
  app.require_subcommand(1);

  PerturbOptions perturb;
  auto* perturb_cmd =
      app.add_subcommand("perturb", "Write one evaluation setting of a dataset");
  perturb_cmd->add_option("--setting", perturb.setting, "original|pio|no|nq|nc")
      ->required()
      ->check(CLI::IsMember({"original", "pio", "no", "nq", "nc"}));
  perturb_cmd->add_option("--in", perturb.in, "Input dataset")->required();
  perturb_cmd->add_option("--out", perturb.out, "Output dataset")->required();
  perturb_cmd->add_option("--choices", perturb.choices,
                          "PIO audit log (id, perturbed_option_index)");
  perturb_cmd->add_option("--seed", perturb.seed, "PIO selection seed");

  AugmentOptions augment;
  auto* augment_cmd = app.add_subcommand(
      "augment", "Materialize one epoch of augmented training triplets");
  augment_cmd->add_option("--in", augment.in, "Input dataset")->required();
  augment_cmd->add_option("--out", augment.out, "Output triplets")->required();
  augment_cmd->add_option("--seed", augment.seed, "Sampler seed")->required();
  augment_cmd->add_option("--epoch", augment.epoch, "Epoch index")->capture_default_str();
  augment_cmd->add_option("--p-correct", augment.p_correct,
                          "Firing probability for the gold option")->capture_default_str();
  augment_cmd->add_option("--p-incorrect", augment.p_incorrect,
                          "Firing probability for each incorrect option")->capture_default_str();

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train the linear scorer");
  train_cmd->add_option("--loss", train.loss, "multiclass|binary")
      ->required()
      ->check(CLI::IsMember({"multiclass", "binary"}));
  auto* augment_flag = train_cmd->add_flag(
      "--augment", train.augment, "Augment triplets on the fly (binary loss)");
  train_cmd->add_option("--p-correct", train.p_correct,
                        "Firing probability for the gold option")->capture_default_str()
      ->needs(augment_flag);
  train_cmd->add_option("--p-incorrect", train.p_incorrect,
                        "Firing probability for each incorrect option")->capture_default_str()
      ->needs(augment_flag);
  train_cmd->add_option("--augment-start-epoch", train.augment_start_epoch,
                        "First epoch (0-based) that is augmented")->capture_default_str()
      ->needs(augment_flag);
  train_cmd->add_option("--epochs", train.epochs,
                        "Epochs (default 4, or 5 with --augment)");
  train_cmd->add_option("--lr", train.lr, "SGD learning rate")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Shuffle and sampler seed")
      ->required();
  train_cmd->add_option("--in", train.in, "Training dataset")->required();
  train_cmd->add_option("--model-out", train.model_out, "Model file")
      ->required();
  train_cmd->add_option("--log-out", train.log_out,
                        "Training log (default: stderr)");

  ScoreOptions score;
  auto* score_cmd =
      app.add_subcommand("score", "Score every option of a dataset");
  AddScorerFlags(score_cmd, score.scorer);
  score_cmd->add_option("--in", score.in, "Dataset to score")->required();
  score_cmd->add_option("--out", score.out, "Prediction file")->required();

  EvaluateOptions evaluate;
  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "Score a dataset under all settings and print the report");
  AddScorerFlags(evaluate_cmd, evaluate.scorer);
  evaluate_cmd->add_option("--in", evaluate.in, "Dataset")->required();
  evaluate_cmd->add_option("--seed", evaluate.seed, "PIO selection seed")
      ->required();
  evaluate_cmd->add_option("--format", evaluate.format, "markdown|tsv")->capture_default_str()
      ->check(CLI::IsMember({"markdown", "tsv"}));
  evaluate_cmd->add_option("--out", evaluate.out, "Report file")->capture_default_str();
  evaluate_cmd->add_option("--name", evaluate.model_name, "Model column label");
  evaluate_cmd->add_option("--dataset-name", evaluate.dataset_name,
                           "Dataset column label");
  evaluate_cmd->add_option("--predictions-dir", evaluate.predictions_dir,
                           "Also write per-setting predictions here");

  ReportOptions report;
  std::map<PerturbationSetting, std::string> report_paths;
  auto* report_cmd = app.add_subcommand(
      "report", "Build the compliance report from prediction files");
  report_cmd->add_option("--gold", report.gold, "Unperturbed dataset")
      ->required();
  report_cmd
      ->add_option("--original", report_paths[PerturbationSetting::kOriginal],
                   "Original-setting predictions")
      ->required();
  for (auto setting : {PerturbationSetting::kPio, PerturbationSetting::kNo,
                       PerturbationSetting::kNq, PerturbationSetting::kNc}) {
    report_cmd->add_option("--" + std::string(SettingName(setting)),
                           report_paths[setting],
                           std::string(SettingLabel(setting)) + " predictions");
  }
  report_cmd->add_option("--pio-choices", report.pio_choices,
                         "PIO audit log, enables echo attraction");
  report_cmd->add_option("--format", report.format, "markdown|tsv")->capture_default_str()
      ->check(CLI::IsMember({"markdown", "tsv"}));
  report_cmd->add_option("--out", report.out, "Report file")->capture_default_str();
  report_cmd->add_option("--model-name", report.model_name,
                         "Model column label")->capture_default_str();
  report_cmd->add_option("--dataset-name", report.dataset_name,
                         "Dataset column label");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("mcqa_probe");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& arg : argv_storage) argv.push_back(arg.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Io io{in, out, err};
  try {
    if (perturb_cmd->parsed()) return RunPerturb(perturb, io);
    if (augment_cmd->parsed()) return RunAugment(augment, io);
    if (train_cmd->parsed()) return RunTrain(train, io);
    if (score_cmd->parsed()) return RunScore(score, io);
    if (evaluate_cmd->parsed()) return RunEvaluate(evaluate, io);
    if (report_cmd->parsed()) {
      for (auto& [setting, path] : report_paths) {
        if (!path.empty()) report.predictions.emplace(setting, path);
      }
      return RunReport(report, io);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {  // includes ConfigError
    err << "validation error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitUsage;
}

}  // namespace mcqa_probe::cli
