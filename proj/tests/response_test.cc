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

#include "prosody/response.h"

#include <algorithm>

#include "gtest/gtest.h"
#include "mutation_corpus.h"
#include "prosody/error.h"
#include "test_util.h"

namespace prosody {
namespace {

using testing::Rng;

const std::vector<Word>& ThreeWords() {
  static const auto* words = new std::vector<Word>(TokenizeWords("I never said"));
  return *words;
}

bool HasDiagnostic(const ParseOutcome& outcome, DiagnosticKind kind, std::size_t line) {
  return std::any_of(outcome.diagnostics.begin(), outcome.diagnostics.end(),
                     [&](const ParseDiagnostic& d) { return d.kind == kind && d.line == line; });
}

std::string Dump(const ParseOutcome& outcome) {
  std::string out;
  for (const auto& d : outcome.diagnostics) out += d.ToString() + "\n";
  return out;
}

TEST(ParseResponse, ValidThreeWords) {
  const auto outcome = ParseResponse(
      "REASONING: The speaker denies it.\n"
      "Stress falls on 'never'.\n"
      "GLOBAL: duration=1 pitch=-2 energy=0\n"
      "WORD 0 I: duration=0 pitch=0 energy=0\n"
      "WORD 1 never: duration=3 pitch=4 energy=5\n"
      "WORD 2 said: duration=0 pitch=0 energy=1\n",
      ThreeWords());
  ASSERT_TRUE(outcome.ok()) << Dump(outcome);
  EXPECT_TRUE(outcome.diagnostics.empty());
  const LlmScaleSuggestion& s = *outcome.suggestion;
  EXPECT_EQ(s.reasoning, "The speaker denies it.\nStress falls on 'never'.");
  EXPECT_EQ(s.global_pitch, -2.0);
  ASSERT_EQ(s.words.size(), 3u);
  EXPECT_EQ(s.words[1], (WordSuggestion{1, "never", 3, 4, 5}));
}

TEST(ParseResponse, WhitespaceCaseAndPunctuationTolerated) {
  const auto outcome = ParseResponse(
      "\n"
      "   GLOBAL:duration = 1,  pitch=0 ; energy=0.5  \r\n"
      "\n"
      "WORD 0 \"I\": duration=0 pitch=0 energy=0\n"
      "WORD   1   NEVER:  duration=+2.5 pitch=0 energy=0\n"
      "WORD 2 said.: energy=1 pitch=0 duration=0\n",
      ThreeWords());
  ASSERT_TRUE(outcome.ok()) << Dump(outcome);
  EXPECT_EQ(outcome.suggestion->reasoning, "");
  EXPECT_EQ(outcome.suggestion->global_energy, 0.5);
  EXPECT_EQ(outcome.suggestion->words[1].duration, 2.5);
  EXPECT_EQ(outcome.suggestion->words[2].energy, 1.0);
}

TEST(ParseResponse, SkippedWordNamesIndex) {
  const auto outcome = ParseResponse(
      "REASONING: x\n"
      "GLOBAL: duration=0 pitch=0 energy=0\n"
      "WORD 0 I: duration=0 pitch=0 energy=0\n"
      "WORD 2 said: duration=0 pitch=0 energy=0\n",
      ThreeWords());
  EXPECT_FALSE(outcome.ok());
  ASSERT_EQ(outcome.diagnostics.size(), 1u) << Dump(outcome);
  const ParseDiagnostic& d = outcome.diagnostics[0];
  EXPECT_EQ(d.kind, DiagnosticKind::kWordCountMismatch);
  EXPECT_EQ(d.line, 4u);
  EXPECT_NE(d.detail.find("index 1"), std::string::npos) << d.detail;
  EXPECT_NE(d.detail.find("never"), std::string::npos) << d.detail;
}

TEST(ParseResponse, LocalValueClampedNotFatal) {
  const auto outcome = ParseResponse(
      "GLOBAL: duration=0 pitch=0 energy=-8\n"
      "WORD 0 I: duration=0 pitch=0 energy=0\n"
      "WORD 1 never: duration=9 pitch=0 energy=0\n"
      "WORD 2 said: duration=0 pitch=-1 energy=0\n",
      ThreeWords());
  ASSERT_TRUE(outcome.ok()) << Dump(outcome);
  EXPECT_EQ(outcome.suggestion->global_energy, -5.0);
  EXPECT_EQ(outcome.suggestion->words[1].duration, 5.0);
  EXPECT_EQ(outcome.suggestion->words[2].pitch, 0.0);
  ASSERT_EQ(outcome.diagnostics.size(), 3u);
  for (const auto& d : outcome.diagnostics) {
    EXPECT_EQ(d.kind, DiagnosticKind::kValueOutOfRange);
    EXPECT_TRUE(d.clamped);
    EXPECT_FALSE(d.IsFatal());
  }
  EXPECT_EQ(outcome.diagnostics[1].line, 3u);
}

TEST(ParseResponse, MissingGlobal) {
  const auto outcome = ParseResponse(
      "REASONING: none\n"
      "WORD 0 I: duration=0 pitch=0 energy=0\n"
      "WORD 1 never: duration=0 pitch=0 energy=0\n"
      "WORD 2 said: duration=0 pitch=0 energy=0\n",
      ThreeWords());
  EXPECT_FALSE(outcome.ok());
  EXPECT_TRUE(HasDiagnostic(outcome, DiagnosticKind::kMissingGlobal, 2)) << Dump(outcome);
}

TEST(ParseResponse, ReportsAllIndependentErrors) {
  const auto outcome = ParseResponse(
      "GLOBAL: duration=x pitch=0 energy=0\n"
      "WORD 0 you: duration=0 pitch=0 energy=0\n"
      "WORD 1 never: duration=0 pitch=0 energy=0\n"
      "WORD 1 never: duration=0 pitch=0 energy=0\n"
      "WORD 2 said: duration=0 pitch=0 energy=0\n"
      "WORD 3 it: duration=0 pitch=0 energy=0\n"
      "Hope this helps!\n",
      ThreeWords());
  EXPECT_FALSE(outcome.ok());
  EXPECT_TRUE(HasDiagnostic(outcome, DiagnosticKind::kValueNotNumeric, 1));
  EXPECT_TRUE(HasDiagnostic(outcome, DiagnosticKind::kWordIdentityMismatch, 2));
  EXPECT_TRUE(HasDiagnostic(outcome, DiagnosticKind::kDuplicateWordIndex, 4));
  EXPECT_TRUE(HasDiagnostic(outcome, DiagnosticKind::kWordCountMismatch, 6));
  EXPECT_TRUE(HasDiagnostic(outcome, DiagnosticKind::kUnparseableLine, 7));
  EXPECT_EQ(outcome.diagnostics.size(), 5u) << Dump(outcome);
  EXPECT_TRUE(std::is_sorted(outcome.diagnostics.begin(), outcome.diagnostics.end(),
                             [](const auto& a, const auto& b) { return a.line < b.line; }));
}

TEST(ParseResponse, OutOfOrderRejected) {
  const auto outcome = ParseResponse(
      "GLOBAL: duration=0 pitch=0 energy=0\n"
      "WORD 1 never: duration=0 pitch=0 energy=0\n"
      "WORD 0 I: duration=0 pitch=0 energy=0\n"
      "WORD 2 said: duration=0 pitch=0 energy=0\n",
      ThreeWords());
  EXPECT_FALSE(outcome.ok());
  EXPECT_TRUE(HasDiagnostic(outcome, DiagnosticKind::kUnparseableLine, 3)) << Dump(outcome);
}

TEST(ParseResponse, MalformedLines) {
  const auto parse = [](const std::string& word_line) {
    return ParseResponse("GLOBAL: duration=0 pitch=0 energy=0\n" + word_line +
                             "\nWORD 1 never: duration=0 pitch=0 energy=0\n"
                             "WORD 2 said: duration=0 pitch=0 energy=0\n",
                         ThreeWords());
  };
  for (const char* line : {"WORD x I: duration=0 pitch=0 energy=0",
                           "WORD 0 I duration=0 pitch=0 energy=0",
                           "WORD 0 I: duration=0 pitch=0",
                           "WORD 0 I: duration=0 pitch=0 energy=0 loudness=2",
                           "WORD 0 I: duration=0 duration=0 pitch=0 energy=0",
                           "WORD 0 I: duration 0 pitch=0 energy=0"}) {
    const auto outcome = parse(line);
    EXPECT_FALSE(outcome.ok()) << line;
    EXPECT_TRUE(HasDiagnostic(outcome, DiagnosticKind::kUnparseableLine, 2))
        << line << "\n" << Dump(outcome);
  }
}

TEST(ParseResponse, ArbitraryTextNeverThrows) {
  Rng rng(31);
  const std::string alphabet = "WORDGLOBAL:=0123456789 .-\n\tabcxyz,;";
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    const int n = testing::UniformInt(rng, 0, 200);
    for (int k = 0; k < n; ++k) {
      text += alphabet[testing::UniformInt(rng, 0, int(alphabet.size()) - 1)];
    }
    ParseOutcome outcome;
    ASSERT_NO_THROW(outcome = ParseResponse(text, ThreeWords()));
    if (!outcome.ok()) {
      EXPECT_FALSE(outcome.diagnostics.empty());
    }
    for (const auto& d : outcome.diagnostics) EXPECT_GE(d.line, 1u);
  }
}

TEST(ParseResponse, EmptyExpectedWordsRejected) {
  EXPECT_THROW(ParseResponse("GLOBAL: duration=0 pitch=0 energy=0\n", {}), Error);
}

TEST(SerializeSuggestion, IdentityTwoWords) {
  const auto words = TokenizeWords("a b");
  LlmScaleSuggestion s = IdentitySuggestion(words);
  EXPECT_EQ(SerializeSuggestion(s, words),
            "REASONING:\n"
            "GLOBAL: duration=0 pitch=0 energy=0\n"
            "WORD 0 a: duration=0 pitch=0 energy=0\n"
            "WORD 1 b: duration=0 pitch=0 energy=0\n");
}

TEST(SerializeSuggestion, AlignmentMismatch) {
  const auto words = TokenizeWords("a b");
  try {
    SerializeSuggestion(IdentitySuggestion({}), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlignmentMismatch);
  }
  LlmScaleSuggestion s = IdentitySuggestion(words);
  s.words[1].key = "c";
  EXPECT_THROW(SerializeSuggestion(s, words), Error);
  s.words.pop_back();
  EXPECT_THROW(SerializeSuggestion(s, words), Error);
}

TEST(SerializeSuggestion, RoundTripOnRandomSuggestions) {
  Rng rng(37);
  const SpeakerStats stats = testing::RandomStats(rng);
  for (int i = 0; i < 1000; ++i) {
    const auto words = testing::RandomUtterance(rng, stats).words;
    const LlmScaleSuggestion s = i % 2 ? testing::RandomIntegerSuggestion(rng, words)
                                       : testing::RandomSuggestion(rng, words, 2.5);
    LlmScaleSuggestion in_range = s;
    const auto clamp = [](double v, double lo, double hi) { return std::clamp(v, lo, hi); };
    in_range.global_duration = clamp(s.global_duration, -5, 5);
    for (auto& w : in_range.words) {
      w.duration = clamp(w.duration, 0, 5);
      w.pitch = clamp(w.pitch, 0, 5);
      w.energy = clamp(w.energy, 0, 5);
    }
    const auto outcome = ParseResponse(SerializeSuggestion(in_range, words), words);
    ASSERT_TRUE(outcome.ok()) << Dump(outcome);
    EXPECT_TRUE(outcome.diagnostics.empty());
    EXPECT_EQ(*outcome.suggestion, in_range);
  }
}

TEST(MutationCorpus, EveryMutationRejectedAtTheRightLine) {
  for (const auto& c : testing::MutationCorpus(101)) {
    const auto outcome = ParseResponse(c.text, c.words);
    EXPECT_FALSE(outcome.ok()) << c.text;
    EXPECT_TRUE(HasDiagnostic(outcome, c.expected_kind, c.expected_line))
        << "expected " << DiagnosticKindName(c.expected_kind) << " at line "
        << c.expected_line << "\n" << c.text << Dump(outcome);
  }
}

}  // namespace
}  // namespace prosody
