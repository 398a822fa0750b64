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

#include "prosody/modifier.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles/naive_modifier.h"
#include "prosody/error.h"
#include "test_util.h"

namespace prosody {
namespace {

using testing::Rng;

SpeakerStats Stats200() {
  return SpeakerStats{std::log(200.0), 0.25, -1.0, 0.5, 100.0, 300.0};
}

UtteranceFeatures OneWord(const SpeakerStats& stats) {
  UtteranceFeatures u;
  u.id = "u";
  u.speaker_id = "s";
  u.text = "ah";
  u.words = TokenizeWords(u.text);
  u.phones = {
      PhoneFeature{"sil", std::nullopt, 0.2, std::nullopt, -3.0, false, true},
      PhoneFeature{"HH", 0, 0.05, std::nullopt, 0.4, false, false},
      PhoneFeature{"AA", 0, 0.10, RenormF0(150.0, stats), 0.3, true, false},
  };
  return u;
}

ModificationPlan OneWordPlan(double g_dur, double g_pitch, double g_energy,
                             double delta, double pi, double epsilon) {
  ModificationPlan plan;
  plan.utterance_id = "u";
  plan.g_dur = g_dur;
  plan.g_pitch_hz = g_pitch;
  plan.g_energy = g_energy;
  plan.words = {WordCoefficients{0, "ah", delta, pi, epsilon}};
  plan.bounds = PitchBounds{-50, 150};
  return plan;
}

void ExpectNear(const UtteranceFeatures& a, const UtteranceFeatures& b, double tol) {
  ASSERT_EQ(a.phones.size(), b.phones.size());
  EXPECT_EQ(a.id, b.id);
  EXPECT_EQ(a.words, b.words);
  for (std::size_t i = 0; i < a.phones.size(); ++i) {
    const PhoneFeature& x = a.phones[i];
    const PhoneFeature& y = b.phones[i];
    EXPECT_EQ(x.label, y.label);
    EXPECT_EQ(x.word_index, y.word_index);
    EXPECT_EQ(x.voiced, y.voiced);
    EXPECT_EQ(x.pause, y.pause);
    EXPECT_NEAR(x.duration_s, y.duration_s, tol);
    EXPECT_NEAR(x.energy, y.energy, tol);
    ASSERT_EQ(x.f0.has_value(), y.f0.has_value());
    if (x.f0) EXPECT_NEAR(*x.f0, *y.f0, tol);
  }
}

TEST(Normalization, SpecExamples) {
  const SpeakerStats stats = Stats200();
  EXPECT_DOUBLE_EQ(DenormF0(0.0, stats), 200.0);
  EXPECT_NEAR(RenormF0(200.0, stats), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(DenormEnergy(0.0, stats), std::exp(-1.0));
}

TEST(Normalization, RoundTrip) {
  Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    const SpeakerStats stats = testing::RandomStats(rng);
    const double x = testing::Uniform(rng, -4, 4);
    EXPECT_NEAR(RenormF0(DenormF0(x, stats), stats), x, 1e-9);
    EXPECT_NEAR(RenormEnergy(DenormEnergy(x, stats), stats), x, 1e-9);
  }
}

TEST(Normalization, NonPositiveRejected) {
  const SpeakerStats stats = Stats200();
  for (double v : {0.0, -1.0}) {
    try {
      RenormF0(v, stats);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNonPositiveF0);
    }
    EXPECT_THROW(RenormEnergy(v, stats), Error);
  }
}

TEST(ApplyPlan, DurationProduct) {
  const SpeakerStats stats = Stats200();
  const auto out = ApplyPlan(OneWord(stats), stats, OneWordPlan(1.5, 0, 1, 1.2, 0, 1));
  EXPECT_NEAR(out.phones[2].duration_s, 0.18, 1e-12);
  // Unvoiced phones are lengthened too.
  EXPECT_NEAR(out.phones[1].duration_s, 0.09, 1e-12);
  // Pauses untouched.
  EXPECT_EQ(out.phones[0], OneWord(stats).phones[0]);
}

TEST(ApplyPlan, PitchSum) {
  const SpeakerStats stats = Stats200();
  const auto in = OneWord(stats);
  const auto out = ApplyPlan(in, stats, OneWordPlan(1, 30, 1, 1, 10, 1));
  EXPECT_NEAR(DenormF0(*out.phones[2].f0, stats), 190.0, 1e-9);
  EXPECT_NEAR(*out.phones[2].f0, RenormF0(190.0, stats), 1e-12);
  EXPECT_EQ(out.phones[1], in.phones[1]);
}

TEST(ApplyPlan, PitchClampedToSpeakerRange) {
  const SpeakerStats stats = Stats200();
  // Bounds wider than this utterance needs; the per-phone clamp still holds.
  ModificationPlan up = OneWordPlan(1, 150, 1, 1, 100, 1);
  up.bounds = PitchBounds{-100, 250};
  const auto out = ApplyPlan(OneWord(stats), stats, up);
  EXPECT_NEAR(DenormF0(*out.phones[2].f0, stats), 300.0, 1e-9);
  ModificationPlan down = OneWordPlan(1, -100, 1, 1, 0, 1);
  down.bounds = PitchBounds{-100, 250};
  const auto low = ApplyPlan(OneWord(stats), stats, down);
  EXPECT_NEAR(DenormF0(*low.phones[2].f0, stats), 100.0, 1e-9);
}

TEST(ApplyPlan, EnergyInLinearDomain) {
  const SpeakerStats stats = Stats200();
  const auto in = OneWord(stats);
  const auto out = ApplyPlan(in, stats, OneWordPlan(1, 0, 2, 1, 0, 1.5));
  EXPECT_NEAR(DenormEnergy(out.phones[2].energy, stats),
              3.0 * DenormEnergy(in.phones[2].energy, stats), 1e-12);
  EXPECT_EQ(out.phones[1].energy, in.phones[1].energy);
}

TEST(ApplyPlan, ShapeMismatch) {
  const SpeakerStats stats = Stats200();
  ModificationPlan plan = OneWordPlan(1, 0, 1, 1, 0, 1);
  plan.words.push_back(plan.words[0]);
  try {
    ApplyPlan(OneWord(stats), stats, plan);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPlanShapeMismatch);
  }
}

TEST(ApplyPlan, RequiresNormalizedFeatures) {
  const SpeakerStats stats = Stats200();
  UtteranceFeatures u = OneWord(stats);
  u.scale = FeatureScale::kRaw;
  EXPECT_THROW(ApplyPlan(u, stats, OneWordPlan(1, 0, 1, 1, 0, 1)), Error);
}

TEST(ApplyPlan, MatchesNaiveLoop) {
  Rng rng(41);
  for (int i = 0; i < 300; ++i) {
    const SpeakerStats stats = testing::RandomStats(rng);
    testing::UtteranceOptions options;
    options.f0_in_range = i % 3 != 0;
    const UtteranceFeatures u = testing::RandomUtterance(rng, stats, options);
    const auto plan = BuildPlan(testing::RandomSuggestion(rng, u.words), u, stats).plan;
    ExpectNear(ApplyPlan(u, stats, plan), testing::NaiveApply(u, stats, plan), 1e-9);
  }
}

TEST(ApplyPlan, IdentityAndExclusions) {
  Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    const SpeakerStats stats = testing::RandomStats(rng);
    const UtteranceFeatures u = testing::RandomUtterance(rng, stats);
    const auto identity = BuildPlan(IdentitySuggestion(u.words), u, stats).plan;
    EXPECT_EQ(ApplyPlan(u, stats, identity), u);

    const auto plan = BuildPlan(testing::RandomSuggestion(rng, u.words), u, stats).plan;
    const auto out = ApplyPlan(u, stats, plan);
    for (std::size_t k = 0; k < u.phones.size(); ++k) {
      const PhoneFeature& a = u.phones[k];
      const PhoneFeature& b = out.phones[k];
      if (a.pause) {
        EXPECT_EQ(a, b);
        continue;
      }
      const WordCoefficients& w = plan.words[*a.word_index];
      EXPECT_NEAR(b.duration_s / a.duration_s, plan.g_dur * w.delta, 1e-12);
      if (!a.voiced) {
        EXPECT_EQ(a.energy, b.energy);
        EXPECT_FALSE(b.f0.has_value());
      } else {
        const double hz = DenormF0(*b.f0, stats);
        EXPECT_GE(hz, stats.f0_min_hz * (1 - 1e-12));
        EXPECT_LE(hz, stats.f0_max_hz * (1 + 1e-12));
      }
    }
  }
}

TEST(ApplyPlan, UniformShiftPreservesOrder) {
  Rng rng(47);
  for (int i = 0; i < 200; ++i) {
    const SpeakerStats stats = testing::RandomStats(rng);
    const UtteranceFeatures u = testing::RandomUtterance(rng, stats);
    LlmScaleSuggestion s = IdentitySuggestion(u.words);
    s.global_pitch = testing::Uniform(rng, -5, 5);
    const double local = testing::Uniform(rng, 0, 5);
    for (auto& w : s.words) w.pitch = local;
    const auto plan = BuildPlan(s, u, stats).plan;
    const auto out = ApplyPlan(u, stats, plan);
    std::vector<std::pair<double, double>> voiced;
    for (std::size_t k = 0; k < u.phones.size(); ++k) {
      if (u.phones[k].voiced) voiced.emplace_back(*u.phones[k].f0, *out.phones[k].f0);
    }
    for (std::size_t a = 0; a < voiced.size(); ++a) {
      for (std::size_t b = 0; b < voiced.size(); ++b) {
        if (voiced[a].first < voiced[b].first) {
          EXPECT_LE(voiced[a].second, voiced[b].second + 1e-12);
        }
      }
    }
  }
}

TEST(ApplyPlan, DurationPlansCompose) {
  Rng rng(53);
  for (int i = 0; i < 100; ++i) {
    const SpeakerStats stats = testing::RandomStats(rng);
    const UtteranceFeatures u = testing::RandomUtterance(rng, stats);
    const auto duration_only = [&]() {
      LlmScaleSuggestion s = IdentitySuggestion(u.words);
      s.global_duration = testing::Uniform(rng, -5, 5);
      for (auto& w : s.words) w.duration = testing::Uniform(rng, 0, 5);
      return BuildPlan(s, u, stats).plan;
    };
    const ModificationPlan a = duration_only();
    const ModificationPlan b = duration_only();
    ModificationPlan ab = a;
    ab.g_dur = a.g_dur * b.g_dur;
    for (std::size_t j = 0; j < ab.words.size(); ++j) {
      ab.words[j].delta = a.words[j].delta * b.words[j].delta;
    }
    // ab may leave the plan ranges; compare against the oracle loop.
    ExpectNear(ApplyPlan(ApplyPlan(u, stats, a), stats, b),
               testing::NaiveApply(u, stats, ab), 1e-12);
  }
}

TEST(ApplyPlan, NormalizedFixtureMatchesOracle) {
  const auto read = [](const std::string& name) {
    std::ifstream in(std::string(PROSODY_TEST_DATA_DIR) + "/" + name);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const SpeakerStats stats = ParseSpeakerStats(read("fixture_stats.tsv"));
  Rng rng(59);
  for (const UtteranceFeatures& u : ParseFeatures(read("fixture_norm.tsv"))) {
    const auto plan = BuildPlan(testing::RandomSuggestion(rng, u.words), u, stats).plan;
    ExpectNear(ApplyPlan(u, stats, plan), testing::NaiveApply(u, stats, plan), 1e-9);
  }
}

}  // namespace
}  // namespace prosody
