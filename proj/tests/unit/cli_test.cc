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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "mcqa_probe/dataset.h"
#include "mcqa_probe/scorer.h"
#include "testing.h"

namespace mcqa_probe::cli {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;
using ::testing::StartsWith;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  const int code = Run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mcqa_probe_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    SaveDataset(testing::SeparableCorpus(120, 4, 5), Path("train.jsonl"));
    SaveDataset(testing::SeparableCorpus(80, 4, 6), Path("dev.jsonl"));
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, HelpExitsZero) {
  const Result r = Invoke({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_THAT(r.out, HasSubstr("perturb"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"perturb", "--setting", "nq", "--in", Path("dev.jsonl"),
                    "--out", Path("x"), "--bogus"})
                .code,
            kExitUsage);
  const Result missing = Invoke({"perturb", "--setting", "nq", "--in", Path("dev.jsonl")});
  EXPECT_EQ(missing.code, kExitUsage);
  EXPECT_THAT(missing.err, HasSubstr("--out"));
  EXPECT_EQ(Invoke({"perturb", "--setting", "xx", "--in", Path("dev.jsonl"),
                    "--out", Path("x")})
                .code,
            kExitUsage);
  EXPECT_FALSE(fs::exists(Path("x")));
}

TEST_F(CliTest, PerturbPioWritesDatasetAndChoices) {
  const Result r =
      Invoke({"perturb", "--setting", "pio", "--in", Path("dev.jsonl"), "--out",
              Path("dev.pio.jsonl"), "--choices", Path("dev.pio.choices.jsonl"),
              "--seed", "17"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Dataset pio = LoadDataset(Path("dev.pio.jsonl"));
  EXPECT_EQ(pio.size(), 80u);
  std::ifstream choices(Path("dev.pio.choices.jsonl"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(choices, line)) {
    EXPECT_THAT(line, StartsWith("{\"id\":\"s"));
    ++lines;
  }
  EXPECT_EQ(lines, 80u);
}

TEST_F(CliTest, PerturbPioNeedsSeed) {
  const Result r = Invoke({"perturb", "--setting", "pio", "--in",
                           Path("dev.jsonl"), "--out", Path("o.jsonl")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(fs::exists(Path("o.jsonl")));
}

TEST_F(CliTest, StdinAndStdout) {
  const std::string input = Slurp(Path("dev.jsonl"));
  const Result r = Invoke({"perturb", "--setting", "nc", "--in", "-", "--out", "-"}, input);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream stream(r.out);
  const Dataset out = ReadDataset(stream);
  EXPECT_EQ(out.instances[0].options[0].context, "<s>");
}

TEST_F(CliTest, InvalidInputWritesNothing) {
  std::ofstream(Path("bad.jsonl")) << "{\"id\":\"a\",\"question\":\"q\",\"options\":"
                                      "[{\"text\":\"a\",\"context\":\"c\"},"
                                      "{\"text\":\"b\",\"context\":\"c\"}],\"gold\":9}\n";
  const Result r = Invoke({"perturb", "--setting", "pio", "--in", Path("bad.jsonl"),
                           "--out", Path("o.jsonl"), "--choices", Path("c.jsonl"),
                           "--seed", "1"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_THAT(r.err, HasSubstr("\"a\""));
  EXPECT_FALSE(fs::exists(Path("o.jsonl")));
  EXPECT_FALSE(fs::exists(Path("c.jsonl")));

  std::ofstream(Path("broken.jsonl")) << "{oops\n";
  EXPECT_EQ(Invoke({"augment", "--in", Path("broken.jsonl"), "--out",
                    Path("t.jsonl"), "--seed", "1"})
                .code,
            kExitUsage);
  EXPECT_FALSE(fs::exists(Path("t.jsonl")));
}

TEST_F(CliTest, MissingInputFileIsRuntimeError) {
  const Result r = Invoke({"perturb", "--setting", "no", "--in", Path("nope.jsonl"),
                           "--out", Path("o.jsonl")});
  EXPECT_EQ(r.code, kExitRuntimeError);
  EXPECT_THAT(r.err, HasSubstr("nope.jsonl"));
}

TEST_F(CliTest, AugmentWritesOneTripletPerOption) {
  const Result r = Invoke({"augment", "--in", Path("dev.jsonl"), "--out",
                           Path("t.jsonl"), "--seed", "4", "--epoch", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream triplets(Path("t.jsonl"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(triplets, line)) ++lines;
  EXPECT_EQ(lines, 320u);
  EXPECT_EQ(Invoke({"augment", "--in", Path("dev.jsonl"), "--out", Path("u.jsonl"),
                    "--seed", "4", "--p-correct", "1.5"})
                .code,
            kExitUsage);
}

TEST_F(CliTest, TrainRejectsMulticlassAugmentation) {
  const Result r = Invoke({"train", "--loss", "multiclass", "--augment", "--seed",
                           "1", "--in", Path("train.jsonl"), "--model-out",
                           Path("m.json")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(fs::exists(Path("m.json")));
  EXPECT_EQ(Invoke({"train", "--loss", "binary", "--p-correct", "0.3", "--seed",
                    "1", "--in", Path("train.jsonl"), "--model-out", Path("m.json")})
                .code,
            kExitUsage);
}

TEST_F(CliTest, TrainWritesModelAndLog) {
  const Result r = Invoke({"train", "--loss", "binary", "--augment", "--p-correct",
                           "0.2", "--p-incorrect", "0.8", "--lr", "0.1", "--seed",
                           "3", "--in", Path("train.jsonl"), "--model-out",
                           Path("m.json"), "--log-out", Path("log.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NO_THROW(LoadModel(Path("m.json")));
  const std::string log = Slurp(Path("log.jsonl"));
  // Five epochs by default with augmentation.
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 5);
  EXPECT_THAT(log, StartsWith("{\"epoch\":0,\"mean_loss\":"));

  const Result to_stderr = Invoke({"train", "--loss", "multiclass", "--seed", "3",
                                   "--in", Path("train.jsonl"), "--model-out",
                                   Path("m2.json")});
  ASSERT_EQ(to_stderr.code, kExitOk);
  EXPECT_EQ(std::count(to_stderr.err.begin(), to_stderr.err.end(), '\n'), 4);
}

TEST_F(CliTest, ScoreNeedsExactlyOneScorer) {
  ASSERT_EQ(Invoke({"train", "--loss", "binary", "--seed", "1", "--in",
                    Path("train.jsonl"), "--model-out", Path("m.json")})
                .code,
            kExitOk);
  EXPECT_EQ(Invoke({"score", "--in", Path("dev.jsonl"), "--out", Path("p.jsonl")}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"score", "--model", Path("m.json"), "--remote",
                    "http://127.0.0.1:1", "--in", Path("dev.jsonl"), "--out",
                    Path("p.jsonl")})
                .code,
            kExitUsage);
  EXPECT_EQ(Invoke({"score", "--model", Path("m.json"), "--batch-size", "3", "--in",
                    Path("dev.jsonl"), "--out", Path("p.jsonl")})
                .code,
            kExitUsage);
  EXPECT_FALSE(fs::exists(Path("p.jsonl")));
}

TEST_F(CliTest, RemoteScoreMatchesLocal) {
  ASSERT_EQ(Invoke({"train", "--loss", "binary", "--seed", "1", "--in",
                    Path("train.jsonl"), "--model-out", Path("m.json")})
                .code,
            kExitOk);
  const LinearScorer model = LoadModel(Path("m.json"));
  testing::MockScoreServer server(testing::EchoHandler(
      [&](const std::string& q, const std::string& o, const std::string& c) {
        return model.Score(q, o, c);
      }));
  ASSERT_EQ(Invoke({"score", "--model", Path("m.json"), "--in", Path("dev.jsonl"),
                    "--out", Path("local.jsonl")})
                .code,
            kExitOk);
  const Result r = Invoke({"score", "--remote", server.url(), "--batch-size", "50",
                           "--workers", "2", "--in", Path("dev.jsonl"), "--out",
                           Path("remote.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Slurp(Path("remote.jsonl")), Slurp(Path("local.jsonl")));
  EXPECT_EQ(server.requests(), 7u);  // 320 items in batches of 50
}

TEST_F(CliTest, RemoteFailureIsRuntimeError) {
  testing::MockScoreServer server(
      [](const std::string&) { return testing::MockReply{503, "busy"}; });
  const Result r = Invoke({"score", "--remote", server.url(), "--in",
                           Path("dev.jsonl"), "--out", Path("p.jsonl")});
  EXPECT_EQ(r.code, kExitRuntimeError);
  EXPECT_THAT(r.err, HasSubstr("503"));
  EXPECT_FALSE(fs::exists(Path("p.jsonl")));
}

TEST_F(CliTest, InvalidTimeoutEnvironment) {
  ::setenv("MCQA_PROBE_REMOTE_TIMEOUT_MS", "soon", 1);
  const Result r = Invoke({"score", "--remote", "http://127.0.0.1:1", "--in",
                           Path("dev.jsonl"), "--out", Path("p.jsonl")});
  ::unsetenv("MCQA_PROBE_REMOTE_TIMEOUT_MS");
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_THAT(r.err, HasSubstr("MCQA_PROBE_REMOTE_TIMEOUT_MS"));
}

TEST_F(CliTest, PipelineIsByteDeterministic) {
  auto run_pipeline = [&](const std::string& tag) {
    auto p = [&](const std::string& name) { return Path(tag + "." + name); };
    std::vector<std::vector<std::string>> commands = {
        {"train", "--loss", "binary", "--augment", "--seed", "3", "--in",
         Path("train.jsonl"), "--model-out", p("m.json"), "--log-out", p("log")}};
    for (const char* setting : {"original", "pio", "no", "nq", "nc"}) {
      std::vector<std::string> perturb = {"perturb", "--setting", setting, "--in",
                                          Path("dev.jsonl"), "--out",
                                          p(std::string(setting) + ".jsonl")};
      if (std::string(setting) == "pio") {
        perturb.insert(perturb.end(),
                       {"--seed", "17", "--choices", p("pio.choices.jsonl")});
      }
      commands.push_back(perturb);
      commands.push_back({"score", "--model", p("m.json"), "--in",
                          p(std::string(setting) + ".jsonl"), "--out",
                          p(std::string(setting) + ".preds")});
    }
    commands.push_back({"report", "--gold", Path("dev.jsonl"), "--original",
                        p("original.preds"), "--pio", p("pio.preds"), "--no",
                        p("no.preds"), "--nq", p("nq.preds"), "--nc", p("nc.preds"),
                        "--pio-choices", p("pio.choices.jsonl"), "--out",
                        p("report.md")});
    for (const auto& command : commands) {
      const Result r = Invoke(command);
      EXPECT_EQ(r.code, kExitOk) << command[0] << ": " << r.err;
    }
  };
  run_pipeline("a");
  run_pipeline("b");
  for (const char* name :
       {"m.json", "log", "pio.jsonl", "pio.choices.jsonl", "no.jsonl", "nq.jsonl",
        "nc.jsonl", "original.preds", "pio.preds", "nc.preds", "report.md"}) {
    EXPECT_EQ(Slurp(Path(std::string("a.") + name)),
              Slurp(Path(std::string("b.") + name)))
        << name;
  }
  const std::string report = Slurp(Path("a.report.md"));
  EXPECT_THAT(report, StartsWith("| Dataset | Model | O (↑) | PIO (↑) | NO (↓) |"));
  EXPECT_THAT(report, HasSubstr("Echo attraction (%)"));
}

TEST_F(CliTest, EvaluateMatchesReportPipeline) {
  ASSERT_EQ(Invoke({"train", "--loss", "multiclass", "--seed", "1", "--in",
                    Path("train.jsonl"), "--model-out", Path("m.json")})
                .code,
            kExitOk);
  const Result eval = Invoke({"evaluate", "--model", Path("m.json"), "--in",
                              Path("dev.jsonl"), "--seed", "9", "--format", "tsv",
                              "--name", "lex", "--predictions-dir", Path("preds")});
  ASSERT_EQ(eval.code, kExitOk) << eval.err;
  const Result report = Invoke(
      {"report", "--gold", Path("dev.jsonl"), "--original",
       Path("preds/original.jsonl"), "--pio", Path("preds/pio.jsonl"), "--no",
       Path("preds/no.jsonl"), "--nq", Path("preds/nq.jsonl"), "--nc",
       Path("preds/nc.jsonl"), "--pio-choices", Path("preds/pio.choices.jsonl"),
       "--format", "tsv", "--model-name", "lex"});
  ASSERT_EQ(report.code, kExitOk) << report.err;
  EXPECT_EQ(report.out, eval.out);
}

TEST_F(CliTest, ReportRejectsMismatchedPredictions) {
  ASSERT_EQ(Invoke({"train", "--loss", "binary", "--seed", "1", "--in",
                    Path("train.jsonl"), "--model-out", Path("m.json")})
                .code,
            kExitOk);
  ASSERT_EQ(Invoke({"score", "--model", Path("m.json"), "--in", Path("train.jsonl"),
                    "--out", Path("wrong.preds")})
                .code,
            kExitOk);
  const Result r = Invoke({"report", "--gold", Path("dev.jsonl"), "--original",
                           Path("wrong.preds"), "--out", Path("r.md")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(fs::exists(Path("r.md")));
}

}  // namespace
}  // namespace mcqa_probe::cli
