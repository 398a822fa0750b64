// Copyright 2026 The Prosody Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prosody/cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles/naive_modifier.h"
#include "prosody/features.h"
#include "prosody/mapping.h"
#include "prosody/modifier.h"

namespace prosody {
namespace {

namespace fs = std::filesystem;

std::string Data(const std::string& name) {
  return std::string(PROSODY_TEST_DATA_DIR) + "/" + name;
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void Spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "prosody");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::string pattern = (fs::temp_directory_path() / "prosody_cli_XXXXXX").string();
    ASSERT_NE(mkdtemp(pattern.data()), nullptr);
    dir_ = pattern;
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string Tmp(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, StatsMatchesFixture) {
  const CliRun r = Cli({"stats", Data("raw_corpus_with_short.tsv")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, Slurp(Data("fixture_stats.tsv")));
  const CliRun to_file = Cli({"stats", Data("raw_corpus.tsv"), "-o", Tmp("s.tsv")});
  EXPECT_EQ(to_file.code, kExitOk);
  EXPECT_EQ(Slurp(Tmp("s.tsv")), r.out);
}

TEST_F(CliTest, StatsDataErrors) {
  EXPECT_EQ(Cli({"stats", Tmp("missing.tsv")}).code, kExitDataError);
  const CliRun degenerate = Cli({"stats", Data("raw_corpus.tsv"), "--min-duration", "100"});
  EXPECT_EQ(degenerate.code, kExitDataError);
  EXPECT_FALSE(degenerate.err.empty());
  EXPECT_TRUE(degenerate.out.empty());
  EXPECT_EQ(Cli({"stats", Data("fixture_norm.tsv")}).code, kExitDataError);
}

TEST_F(CliTest, PromptGoldenPerMode) {
  const CliRun neutral = Cli({"prompt", "--text", "The train leaves at noon, not at one."});
  EXPECT_EQ(neutral.code, kExitOk);
  EXPECT_EQ(neutral.out, Slurp(Data("golden/prompt_neutral.txt")));
  const CliRun style = Cli({"prompt", "--mode", "style", "--style", "frightened", "--text",
                         "Who is there?"});
  EXPECT_EQ(style.out, Slurp(Data("golden/prompt_style.txt")));
  const CliRun dialogue = Cli({"prompt", "--mode", "dialogue", "--previous-line",
                            "You forgot my birthday again.", "--text",
                            "I am so sorry, it won't happen again."});
  EXPECT_EQ(dialogue.out, Slurp(Data("golden/prompt_dialogue.txt")));
  EXPECT_EQ(Cli({"prompt", "--text", "The train leaves at noon, not at one."}).out,
            neutral.out);
}

TEST_F(CliTest, PromptInvalidCombinations) {
  EXPECT_EQ(Cli({"prompt", "--mode", "style", "--text", "Hi"}).code, kExitDataError);
  EXPECT_EQ(Cli({"prompt", "--mode", "dialogue", "--text", "Hi"}).code, kExitDataError);
  EXPECT_EQ(Cli({"prompt", "--style", "sad", "--text", "Hi"}).code, kExitDataError);
  EXPECT_EQ(Cli({"prompt", "--text", "!!"}).code, kExitDataError);
  EXPECT_EQ(Cli({"prompt"}).code, kExitDataError);
  EXPECT_EQ(Cli({"prompt", "--mode", "shouting", "--text", "Hi"}).code, kExitDataError);
  EXPECT_EQ(Cli({"bogus"}).code, kExitDataError);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, PromptCustomExemplars) {
  Spit(Tmp("ex.txt"),
       "TEXT: Only one\nREASONING: Plain.\nGLOBAL: duration=0 pitch=0 energy=0\n"
       "WORD 0 Only: duration=0 pitch=0 energy=0\nWORD 1 one: duration=0 pitch=0 energy=0\n");
  const CliRun r = Cli({"prompt", "--text", "Hi", "--exemplars", Tmp("ex.txt")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("Text: Only one"), std::string::npos);
  EXPECT_EQ(r.out.find("### Example 2"), std::string::npos);
  Spit(Tmp("bad.txt"), "TEXT: Only one\nGLOBAL: duration=0 pitch=0 energy=0\n");
  EXPECT_EQ(Cli({"prompt", "--text", "Hi", "--exemplars", Tmp("bad.txt")}).code,
            kExitDataError);
}

std::vector<std::string> PlanArgs(const std::string& out) {
  return {"plan", "--features", Data("fixture_norm.tsv"), "--stats",
          Data("fixture_stats.tsv"), "--backend", "mock", "--seed", "7", "-o", out};
}

TEST_F(CliTest, PlanMockGolden) {
  std::vector<std::string> args = PlanArgs(Tmp("plan.tsv"));
  args.push_back("--transcript");
  args.push_back(Tmp("transcript.json"));
  const CliRun r = Cli(args);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Slurp(Tmp("plan.tsv")), Slurp(Data("golden/plan_seed7.tsv")));
  const std::string transcript = Slurp(Tmp("transcript.json"));
  EXPECT_NE(transcript.find("\"id\": \"LJ001-0001\""), std::string::npos);
  EXPECT_NE(transcript.find("\"id\": \"LJ001-0002\""), std::string::npos);

  // Parallelism does not change the output.
  args = PlanArgs(Tmp("plan1.tsv"));
  args.push_back("--max-parallel");
  args.push_back("1");
  EXPECT_EQ(Cli(args).code, kExitOk);
  EXPECT_EQ(Slurp(Tmp("plan1.tsv")), Slurp(Tmp("plan.tsv")));
}

TEST_F(CliTest, PlanSelectedUtteranceWithText) {
  std::vector<std::string> args = PlanArgs(Tmp("plan.tsv"));
  for (const char* a : {"--utterance", "LJ001-0002", "--mode", "style", "--style",
                        "bored", "--text", "With which we are concerned!"}) {
    args.push_back(a);
  }
  const CliRun r = Cli(args);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto plans = ReadPlanFile(Tmp("plan.tsv"));
  ASSERT_EQ(plans.size(), 1u);
  EXPECT_EQ(plans[0].utterance_id, "LJ001-0002");
}

TEST_F(CliTest, PlanWordMismatch) {
  std::vector<std::string> args = PlanArgs(Tmp("plan.tsv"));
  for (const char* a : {"--utterance", "LJ001-0002", "--text", "Something else entirely"}) {
    args.push_back(a);
  }
  EXPECT_EQ(Cli(args).code, kExitDataError);
  // --text with several utterances is ambiguous.
  args = PlanArgs(Tmp("plan.tsv"));
  args.push_back("--text");
  args.push_back("with which we are concerned");
  EXPECT_EQ(Cli(args).code, kExitDataError);
  args = PlanArgs(Tmp("plan.tsv"));
  args.push_back("--utterance");
  args.push_back("nope");
  EXPECT_EQ(Cli(args).code, kExitDataError);
}

TEST_F(CliTest, PlanHttpWithoutKey) {
  unsetenv("PROSODY_CLI_TEST_NO_KEY");
  const CliRun r = Cli({"plan", "--features", Data("fixture_norm.tsv"), "--stats",
                     Data("fixture_stats.tsv"), "--backend", "http", "--api-key-env",
                     "PROSODY_CLI_TEST_NO_KEY", "--base-url", "http://127.0.0.1:9",
                     "-o", Tmp("plan.tsv")});
  EXPECT_EQ(r.code, kExitBackendError);
  EXPECT_NE(r.err.find("PROSODY_CLI_TEST_NO_KEY"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(Tmp("plan.tsv")));
}

TEST_F(CliTest, PlanRequiresBackendChoice) {
  EXPECT_EQ(Cli({"plan", "--features", Data("fixture_norm.tsv"), "--stats",
                 Data("fixture_stats.tsv")})
                .code,
            kExitDataError);
}

TEST_F(CliTest, ApplyIdentityPlanIsNoOp) {
  const auto utterances = ReadFeatureFile(Data("fixture_norm.tsv"));
  const SpeakerStats stats = ReadStatsFile(Data("fixture_stats.tsv"));
  std::vector<ModificationPlan> plans;
  for (const auto& u : utterances) {
    plans.push_back(BuildPlan(IdentitySuggestion(u.words), u, stats).plan);
  }
  WritePlanFile(Tmp("identity.tsv"), plans);
  const CliRun r = Cli({"apply", "--features", Data("fixture_norm.tsv"), "--stats",
                     Data("fixture_stats.tsv"), "--plan", Tmp("identity.tsv"), "-o",
                     Tmp("out.tsv")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Slurp(Tmp("out.tsv")), Slurp(Data("fixture_norm.tsv")));
}

TEST_F(CliTest, ApplyGoldenPlanMatchesOracle) {
  const CliRun r = Cli({"apply", "--features", Data("fixture_norm.tsv"), "--stats",
                     Data("fixture_stats.tsv"), "--plan", Data("golden/plan_seed7.tsv"),
                     "-o", Tmp("out.tsv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto utterances = ReadFeatureFile(Data("fixture_norm.tsv"));
  const SpeakerStats stats = ReadStatsFile(Data("fixture_stats.tsv"));
  const auto plans = ReadPlanFile(Data("golden/plan_seed7.tsv"));
  std::vector<UtteranceFeatures> expected;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    expected.push_back(testing::NaiveApply(utterances[i], stats, plans[i]));
  }
  EXPECT_EQ(Slurp(Tmp("out.tsv")), SerializeFeatures(expected));
  EXPECT_EQ(Slurp(Tmp("out.tsv")), Slurp(Data("golden/applied_seed7.tsv")));
}

TEST_F(CliTest, ApplyErrors) {
  const std::vector<std::string> base = {"apply", "--stats", Data("fixture_stats.tsv"),
                                         "-o", Tmp("out.tsv")};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return Cli(args).code;
  };
  EXPECT_EQ(with({"--features", Tmp("missing.tsv"), "--plan", Data("golden/plan_seed7.tsv")}),
            kExitDataError);
  // Plan with one word too many.
  std::string plan = Slurp(Data("golden/plan_seed7.tsv"));
  const std::size_t bounds = plan.find("BOUNDS");
  const std::size_t word_start = plan.rfind("WORD", bounds);
  std::string extra_word = plan.substr(word_start, bounds - word_start);
  const std::size_t tab = extra_word.find('\t', 5);
  extra_word = "WORD\t9" + extra_word.substr(tab);
  plan.insert(bounds, extra_word);
  Spit(Tmp("long.tsv"), plan);
  EXPECT_EQ(with({"--features", Data("fixture_norm.tsv"), "--plan", Tmp("long.tsv")}),
            kExitDataError);
  // Plan for an utterance that is not in the feature file.
  Spit(Tmp("other.tsv"), "PLAN\tnope\nGLOBAL\t1\t0\t1\nWORD\t0\tx\t1\t0\t1\nBOUNDS\t0\t0\n");
  EXPECT_EQ(with({"--features", Data("fixture_norm.tsv"), "--plan", Tmp("other.tsv")}),
            kExitDataError);
}

TEST_F(CliTest, EvalPrefPrintsTable) {
  const CliRun r = Cli({"eval", "pref", Data("pref_style.tsv")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("pref.total\t560\n"), std::string::npos);
  EXPECT_NE(r.out.find("pref.baseline.percent\t51.4\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("pref.prompted.percent\t30.9\n"), std::string::npos);
  EXPECT_NE(r.out.find("pref.reference.percent\t17.7\n"), std::string::npos);

  std::string text = Slurp(Data("pref_style.tsv"));
  const std::size_t header_end = text.find('\n') + 1;
  std::vector<std::string> rows;
  std::istringstream body(text.substr(header_end));
  for (std::string line; std::getline(body, line);) rows.push_back(line);
  std::shuffle(rows.begin(), rows.end(), std::mt19937_64(9));
  std::string shuffled = text.substr(0, header_end);
  for (const auto& row : rows) shuffled += row + "\n";
  Spit(Tmp("shuffled.tsv"), shuffled);
  EXPECT_EQ(Cli({"eval", "pref", Tmp("shuffled.tsv")}).out, r.out);
}

TEST_F(CliTest, EvalEmptyAndMalformed) {
  Spit(Tmp("empty.tsv"), "");
  EXPECT_EQ(Cli({"eval", "pref", Tmp("empty.tsv")}).code, kExitDataError);
  EXPECT_EQ(Cli({"eval", "mos", Tmp("empty.tsv")}).code, kExitDataError);
  Spit(Tmp("header.tsv"), "set_id\trater_id\tchosen_system\tsystems\n");
  EXPECT_EQ(Cli({"eval", "pref", Tmp("header.tsv")}).code, kExitDataError);
  EXPECT_EQ(Cli({"eval", "pref", Tmp("missing.tsv")}).code, kExitDataError);
  EXPECT_EQ(Cli({"eval", "pref", Data("mos_ratings.tsv")}).code, kExitDataError);
  EXPECT_EQ(Cli({"eval"}).code, kExitDataError);
}

TEST_F(CliTest, EvalMos) {
  const CliRun r = Cli({"eval", "mos", Data("mos_ratings.tsv"), "--paired", "proposed",
                     "baseline"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("mos.baseline.display\t3.1 +- 0.2\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("ttest.proposed_vs_baseline.pairs\t240\n"), std::string::npos);
}

TEST_F(CliTest, EvalStyles) {
  const CliRun r = Cli({"eval", "styles", Data("pref_dialogue.tsv"), "--styles",
                     Data("dialogue_styles.tsv")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("style.sad.total\t80\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("style.excited.baseline.wins\t43\n"), std::string::npos);
  Spit(Tmp("partial.tsv"), "set_id\tstyle\ndlg_set00\tsad\n");
  EXPECT_EQ(Cli({"eval", "styles", Data("pref_dialogue.tsv"), "--styles", Tmp("partial.tsv")})
                .code,
            kExitDataError);
}

}  // namespace
}  // namespace prosody
