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

// Maps LLM-scale suggestions onto clamped modification coefficients.
//
// The LLM answers on two small integer-friendly scales: [-5, 5] for the
// utterance-level values and [0, 5] for the per-word values. Those are mapped
// to the coefficient ranges applied to the features:
//
//   duration'_i = duration_i * g_dur * delta_j        g_dur    in [0.5, 2]
//   energy'_i   = energy_i * g_energy * epsilon_j     g_energy in [0.5, 2]
//   f0'_i       = f0_i + g_pitch_hz + pi_j            delta_j, epsilon_j in [1, 2]
//
// with g_pitch_hz + pi_j inside the per-utterance PitchBounds.

#ifndef PROSODY_MAPPING_H_
#define PROSODY_MAPPING_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "prosody/features.h"

namespace prosody {

inline constexpr double kGlobalScaleMin = -5.0;
inline constexpr double kGlobalScaleMax = 5.0;
inline constexpr double kLocalScaleMin = 0.0;
inline constexpr double kLocalScaleMax = 5.0;

struct WordSuggestion {
  std::size_t index = 0;
  std::string key;
  double duration = 0.0;
  double pitch = 0.0;
  double energy = 0.0;

  bool operator==(const WordSuggestion&) const = default;
};

// Raw LLM output: globals in [-5, 5], one entry per target word in [0, 5].
struct LlmScaleSuggestion {
  std::string reasoning;
  double global_duration = 0.0;
  double global_pitch = 0.0;
  double global_energy = 0.0;
  std::vector<WordSuggestion> words;

  bool operator==(const LlmScaleSuggestion&) const = default;
};

// All-zero suggestion for the given words, i.e. "change nothing".
LlmScaleSuggestion IdentitySuggestion(const std::vector<Word>& words);

struct PitchBounds {
  double p_min_hz = 0.0;  // <= 0
  double p_max_hz = 0.0;  // >= 0

  bool operator==(const PitchBounds&) const = default;
};

struct WordCoefficients {
  std::size_t index = 0;
  std::string surface;
  double delta = 1.0;
  double pi_hz = 0.0;
  double epsilon = 1.0;

  bool operator==(const WordCoefficients&) const = default;
};

struct ModificationPlan {
  std::string utterance_id;
  double g_dur = 1.0;
  double g_pitch_hz = 0.0;
  double g_energy = 1.0;
  std::vector<WordCoefficients> words;
  PitchBounds bounds;

  bool operator==(const ModificationPlan&) const = default;
};

struct MappingConfig {
  // Fraction of p_max_hz a single word's pi can reach.
  double local_pitch_cap_fraction = 0.5;
};

// One suggestion value that had to be clamped into its scale.
struct ClampReport {
  std::string field;  // e.g. "global.duration", "word[3].pitch"
  double original = 0.0;
  double clamped = 0.0;

  bool operator==(const ClampReport&) const = default;
};

struct PlanResult {
  ModificationPlan plan;
  std::vector<ClampReport> clamps;
};

// Largest admissible downward/upward uniform F0 shift (Hz) keeping the
// utterance's voiced phones inside the speaker's range. Zero is always
// admissible. Throws kNoVoicedPhones.
PitchBounds ComputePitchBounds(const UtteranceFeatures& utterance,
                               const SpeakerStats& stats);

// [-5, 0] -> [0.5, 1] and [0, 5] -> [1, 2], linear on each piece.
double MapGlobalScale(double value);

// [0, 5] -> [1, 2].
double MapLocalScale(double value);

struct PitchShift {
  double global_hz = 0.0;
  double local_hz = 0.0;
};

// The global value maps onto [p_min, 0] / [0, p_max]; the local value onto
// [0, cap * p_max]. The local part is reduced (never below 0) so that
// global + local <= p_max.
PitchShift MapPitch(double global_value, double local_value,
                    const PitchBounds& bounds, const MappingConfig& config);

// Throws kWordMismatch if the suggestion's words are not the utterance's
// words in order, kInvalidInput for non-finite values or a bad config.
PlanResult BuildPlan(const LlmScaleSuggestion& suggestion,
                     const UtteranceFeatures& utterance,
                     const SpeakerStats& stats,
                     const MappingConfig& config = {});

// Throws kInvalidInput describing the first violated coefficient range.
void ValidatePlan(const ModificationPlan& plan);

// Plan file, one block per utterance:
//   PLAN<TAB>utterance_id
//   GLOBAL<TAB>g_dur<TAB>g_pitch_hz<TAB>g_energy
//   WORD<TAB>j<TAB>surface<TAB>delta<TAB>pi_hz<TAB>epsilon     (per word)
//   BOUNDS<TAB>p_min_hz<TAB>p_max_hz
// A single block may omit the PLAN line (empty utterance id).
std::vector<ModificationPlan> ParsePlans(std::string_view document);
std::string SerializePlans(const std::vector<ModificationPlan>& plans);

std::vector<ModificationPlan> ReadPlanFile(const std::string& path);
void WritePlanFile(const std::string& path,
                   const std::vector<ModificationPlan>& plans);

}  // namespace prosody

#endif  // PROSODY_MAPPING_H_
