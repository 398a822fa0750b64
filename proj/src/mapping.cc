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

#include "prosody/mapping.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prosody/error.h"
#include "prosody/modifier.h"
#include "text_util.h"

namespace prosody {
namespace {

void CheckConfig(const MappingConfig& config) {
  if (!(config.local_pitch_cap_fraction >= 0.0 &&
        config.local_pitch_cap_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidInput,
                "local_pitch_cap_fraction must be within [0, 1]");
  }
}

double ClampValue(double value, double lo, double hi, std::string field,
                  std::vector<ClampReport>& clamps) {
  if (std::isnan(value)) {
    throw Error(ErrorCode::kInvalidInput, field + " is not a number");
  }
  const double clamped = std::clamp(value, lo, hi);
  if (clamped != value) {
    clamps.push_back(ClampReport{std::move(field), value, clamped});
  }
  return clamped;
}

[[noreturn]] void FailPlan(const ModificationPlan& plan, const std::string& why) {
  std::string who = plan.utterance_id.empty() ? "plan" : "plan '" + plan.utterance_id + "'";
  throw Error(ErrorCode::kInvalidInput, who + ": " + why);
}

bool InRange(double v, double lo, double hi) { return v >= lo && v <= hi; }

[[noreturn]] void FailLine(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::kMalformedFile,
              "line " + std::to_string(line) + ": " + reason);
}

double NumberAt(std::string_view field, std::size_t line) {
  const auto value = internal::ParseDouble(field);
  if (!value) FailLine(line, "bad number '" + std::string(field) + "'");
  return *value;
}

}  // namespace

LlmScaleSuggestion IdentitySuggestion(const std::vector<Word>& words) {
  LlmScaleSuggestion suggestion;
  for (std::size_t j = 0; j < words.size(); ++j) {
    suggestion.words.push_back(WordSuggestion{j, words[j].key, 0.0, 0.0, 0.0});
  }
  return suggestion;
}

PitchBounds ComputePitchBounds(const UtteranceFeatures& utterance,
                               const SpeakerStats& stats) {
  double lowest = std::numeric_limits<double>::infinity();
  double highest = -std::numeric_limits<double>::infinity();
  for (const PhoneFeature& p : utterance.phones) {
    if (!p.voiced || !p.f0) continue;
    const double hz = DenormF0(*p.f0, stats);
    lowest = std::min(lowest, hz);
    highest = std::max(highest, hz);
  }
  if (lowest > highest) {
    throw Error(ErrorCode::kNoVoicedPhones,
                "utterance '" + utterance.id + "' has no voiced phones");
  }
  return PitchBounds{std::min(0.0, stats.f0_min_hz - lowest),
                     std::max(0.0, stats.f0_max_hz - highest)};
}

double MapGlobalScale(double value) {
  const double v = std::clamp(value, kGlobalScaleMin, kGlobalScaleMax);
  return v <= 0.0 ? 1.0 + 0.5 * (v / 5.0) : 1.0 + v / 5.0;
}

double MapLocalScale(double value) {
  const double v = std::clamp(value, kLocalScaleMin, kLocalScaleMax);
  return 1.0 + v / 5.0;
}

PitchShift MapPitch(double global_value, double local_value,
                    const PitchBounds& bounds, const MappingConfig& config) {
  CheckConfig(config);
  if (!(bounds.p_min_hz <= 0.0 && bounds.p_max_hz >= 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "pitch bounds must straddle zero");
  }
  const double g = std::clamp(global_value, kGlobalScaleMin, kGlobalScaleMax);
  const double l = std::clamp(local_value, kLocalScaleMin, kLocalScaleMax);

  PitchShift shift;
  shift.global_hz = g <= 0.0 ? (-g / 5.0) * bounds.p_min_hz
                             : (g / 5.0) * bounds.p_max_hz;
  shift.local_hz = (l / 5.0) * config.local_pitch_cap_fraction * bounds.p_max_hz;
  if (shift.global_hz + shift.local_hz > bounds.p_max_hz) {
    shift.local_hz = std::max(0.0, bounds.p_max_hz - shift.global_hz);
    // a + (b - a) can land one ulp above b.
    while (shift.local_hz > 0.0 &&
           shift.global_hz + shift.local_hz > bounds.p_max_hz) {
      shift.local_hz = std::nextafter(shift.local_hz, 0.0);
    }
  }
  return shift;
}

PlanResult BuildPlan(const LlmScaleSuggestion& suggestion,
                     const UtteranceFeatures& utterance,
                     const SpeakerStats& stats, const MappingConfig& config) {
  CheckConfig(config);
  ValidateStats(stats);
  if (utterance.scale != FeatureScale::kNormalized) {
    throw Error(ErrorCode::kInvalidInput,
                "utterance '" + utterance.id + "' is not normalized");
  }

  const std::vector<Word>& words = utterance.words;
  if (suggestion.words.size() != words.size()) {
    throw Error(ErrorCode::kWordMismatch,
                "utterance '" + utterance.id + "' has " +
                    std::to_string(words.size()) + " words, suggestion has " +
                    std::to_string(suggestion.words.size()));
  }
  for (std::size_t j = 0; j < words.size(); ++j) {
    const WordSuggestion& w = suggestion.words[j];
    if (w.index != j || WordKey(w.key) != words[j].key) {
      throw Error(ErrorCode::kWordMismatch,
                  "word " + std::to_string(j) + ": expected '" + words[j].key +
                      "', suggestion has '" + w.key + "' at index " +
                      std::to_string(w.index));
    }
  }

  const bool has_voiced =
      std::any_of(utterance.phones.begin(), utterance.phones.end(),
                  [](const PhoneFeature& p) { return p.voiced; });

  PlanResult result;
  std::vector<ClampReport>& clamps = result.clamps;
  ModificationPlan& plan = result.plan;
  plan.utterance_id = utterance.id;
  plan.bounds = has_voiced ? ComputePitchBounds(utterance, stats) : PitchBounds{};

  const double g_dur = ClampValue(suggestion.global_duration, kGlobalScaleMin,
                                  kGlobalScaleMax, "global.duration", clamps);
  const double g_pitch = ClampValue(suggestion.global_pitch, kGlobalScaleMin,
                                    kGlobalScaleMax, "global.pitch", clamps);
  const double g_energy = ClampValue(suggestion.global_energy, kGlobalScaleMin,
                                     kGlobalScaleMax, "global.energy", clamps);
  plan.g_dur = MapGlobalScale(g_dur);
  plan.g_energy = MapGlobalScale(g_energy);
  plan.g_pitch_hz = MapPitch(g_pitch, 0.0, plan.bounds, config).global_hz;

  for (std::size_t j = 0; j < words.size(); ++j) {
    const WordSuggestion& w = suggestion.words[j];
    const std::string prefix = "word[" + std::to_string(j) + "].";
    const double dur = ClampValue(w.duration, kLocalScaleMin, kLocalScaleMax,
                                  prefix + "duration", clamps);
    const double pitch = ClampValue(w.pitch, kLocalScaleMin, kLocalScaleMax,
                                    prefix + "pitch", clamps);
    const double energy = ClampValue(w.energy, kLocalScaleMin, kLocalScaleMax,
                                     prefix + "energy", clamps);
    WordCoefficients c;
    c.index = j;
    c.surface = words[j].surface;
    c.delta = MapLocalScale(dur);
    c.epsilon = MapLocalScale(energy);
    c.pi_hz = MapPitch(g_pitch, pitch, plan.bounds, config).local_hz;
    plan.words.push_back(std::move(c));
  }
  ValidatePlan(plan);
  return result;
}

void ValidatePlan(const ModificationPlan& plan) {
  const PitchBounds& b = plan.bounds;
  if (!std::isfinite(b.p_min_hz) || !std::isfinite(b.p_max_hz) ||
      b.p_min_hz > 0.0 || b.p_max_hz < 0.0) {
    FailPlan(plan, "bounds must satisfy p_min <= 0 <= p_max");
  }
  if (!InRange(plan.g_dur, 0.5, 2.0)) FailPlan(plan, "g_dur outside [0.5, 2]");
  if (!InRange(plan.g_energy, 0.5, 2.0)) FailPlan(plan, "g_energy outside [0.5, 2]");
  if (!std::isfinite(plan.g_pitch_hz)) FailPlan(plan, "g_pitch_hz not finite");
  for (std::size_t j = 0; j < plan.words.size(); ++j) {
    const WordCoefficients& w = plan.words[j];
    const std::string where = "word " + std::to_string(j) + ": ";
    if (w.index != j) FailPlan(plan, where + "indices must be 0..W-1 in order");
    if (!InRange(w.delta, 1.0, 2.0)) FailPlan(plan, where + "delta outside [1, 2]");
    if (!InRange(w.epsilon, 1.0, 2.0)) FailPlan(plan, where + "epsilon outside [1, 2]");
    if (!(std::isfinite(w.pi_hz) && w.pi_hz >= 0.0)) FailPlan(plan, where + "pi must be >= 0");
    if (!InRange(plan.g_pitch_hz + w.pi_hz, b.p_min_hz, b.p_max_hz)) {
      FailPlan(plan, where + "g_pitch + pi outside [p_min, p_max]");
    }
  }
  if (plan.words.empty() && !InRange(plan.g_pitch_hz, b.p_min_hz, b.p_max_hz)) {
    FailPlan(plan, "g_pitch outside [p_min, p_max]");
  }
}

std::vector<ModificationPlan> ParsePlans(std::string_view document) {
  std::vector<ModificationPlan> plans;
  // Expected next record within the current block.
  enum class State { kStart, kAfterPlan, kWords, kDone } state = State::kStart;
  const auto lines = internal::SplitLines(document);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    if (internal::Trim(lines[n]).empty()) continue;
    const auto f = internal::Split(lines[n], '\t');
    const std::string_view tag = f[0];
    if (tag == "PLAN") {
      if (state != State::kStart && state != State::kDone) {
        FailLine(line_no, "PLAN inside an unfinished block");
      }
      if (f.size() != 2 || f[1].empty()) FailLine(line_no, "PLAN needs an utterance id");
      plans.push_back(ModificationPlan{});
      plans.back().utterance_id = std::string(f[1]);
      state = State::kAfterPlan;
    } else if (tag == "GLOBAL") {
      if (state == State::kStart || state == State::kDone) {
        if (!plans.empty()) FailLine(line_no, "GLOBAL without PLAN line");
        plans.push_back(ModificationPlan{});
      } else if (state != State::kAfterPlan) {
        FailLine(line_no, "unexpected GLOBAL");
      }
      if (f.size() != 4) FailLine(line_no, "GLOBAL needs 3 values");
      ModificationPlan& plan = plans.back();
      plan.g_dur = NumberAt(f[1], line_no);
      plan.g_pitch_hz = NumberAt(f[2], line_no);
      plan.g_energy = NumberAt(f[3], line_no);
      state = State::kWords;
    } else if (tag == "WORD") {
      if (state != State::kWords) FailLine(line_no, "WORD outside a plan block");
      if (f.size() != 6) FailLine(line_no, "WORD needs index, surface and 3 values");
      const auto index = internal::ParseInt(f[1]);
      if (!index || *index < 0) FailLine(line_no, "bad word index");
      WordCoefficients w;
      w.index = static_cast<std::size_t>(*index);
      w.surface = std::string(f[2]);
      w.delta = NumberAt(f[3], line_no);
      w.pi_hz = NumberAt(f[4], line_no);
      w.epsilon = NumberAt(f[5], line_no);
      plans.back().words.push_back(std::move(w));
    } else if (tag == "BOUNDS") {
      if (state != State::kWords) FailLine(line_no, "BOUNDS outside a plan block");
      if (f.size() != 3) FailLine(line_no, "BOUNDS needs 2 values");
      plans.back().bounds.p_min_hz = NumberAt(f[1], line_no);
      plans.back().bounds.p_max_hz = NumberAt(f[2], line_no);
      try {
        ValidatePlan(plans.back());
      } catch (const Error& e) {
        FailLine(line_no, e.what());
      }
      state = State::kDone;
    } else {
      FailLine(line_no, "unknown record '" + std::string(tag) + "'");
    }
  }
  if (state != State::kStart && state != State::kDone) {
    throw Error(ErrorCode::kMalformedFile, "plan file ends inside a block");
  }
  return plans;
}

std::string SerializePlans(const std::vector<ModificationPlan>& plans) {
  using internal::FormatShortest;
  std::string out;
  for (const ModificationPlan& plan : plans) {
    if (!plan.utterance_id.empty()) out += "PLAN\t" + plan.utterance_id + '\n';
    out += "GLOBAL\t" + FormatShortest(plan.g_dur) + '\t' +
           FormatShortest(plan.g_pitch_hz) + '\t' +
           FormatShortest(plan.g_energy) + '\n';
    for (const WordCoefficients& w : plan.words) {
      out += "WORD\t" + std::to_string(w.index) + '\t' + w.surface + '\t' +
             FormatShortest(w.delta) + '\t' + FormatShortest(w.pi_hz) + '\t' +
             FormatShortest(w.epsilon) + '\n';
    }
    out += "BOUNDS\t" + FormatShortest(plan.bounds.p_min_hz) + '\t' +
           FormatShortest(plan.bounds.p_max_hz) + '\n';
  }
  return out;
}

std::vector<ModificationPlan> ReadPlanFile(const std::string& path) {
  try {
    return ParsePlans(internal::ReadFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void WritePlanFile(const std::string& path,
                   const std::vector<ModificationPlan>& plans) {
  internal::WriteFile(path, SerializePlans(plans));
}

}  // namespace prosody
