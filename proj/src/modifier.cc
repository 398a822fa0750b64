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

#include <algorithm>
#include <cmath>

#include "prosody/error.h"

namespace prosody {
namespace {

double ToLinear(double normalized, double mu, double sigma) {
  return std::exp(normalized * sigma + mu);
}

double ToNormalized(double linear, double mu, double sigma, const char* what) {
  if (!(linear > 0.0) || !std::isfinite(linear)) {
    throw Error(ErrorCode::kNonPositiveF0,
                std::string(what) + " must be positive and finite to take its log");
  }
  return (std::log(linear) - mu) / sigma;
}

}  // namespace

double DenormF0(double f0_norm, const SpeakerStats& stats) {
  return ToLinear(f0_norm, stats.mu_logf0, stats.sigma_logf0);
}

double RenormF0(double hz, const SpeakerStats& stats) {
  return ToNormalized(hz, stats.mu_logf0, stats.sigma_logf0, "F0");
}

double DenormEnergy(double energy_norm, const SpeakerStats& stats) {
  return ToLinear(energy_norm, stats.mu_loge, stats.sigma_loge);
}

double RenormEnergy(double linear, const SpeakerStats& stats) {
  return ToNormalized(linear, stats.mu_loge, stats.sigma_loge, "energy");
}

UtteranceFeatures ApplyPlan(const UtteranceFeatures& utterance,
                            const SpeakerStats& stats,
                            const ModificationPlan& plan) {
  if (utterance.scale != FeatureScale::kNormalized) {
    throw Error(ErrorCode::kInvalidInput,
                "utterance '" + utterance.id + "' is not normalized");
  }
  if (plan.words.size() != utterance.words.size()) {
    throw Error(ErrorCode::kPlanShapeMismatch,
                "utterance '" + utterance.id + "' has " +
                    std::to_string(utterance.words.size()) +
                    " words, plan has " + std::to_string(plan.words.size()));
  }
  ValidateStats(stats);
  ValidatePlan(plan);

  UtteranceFeatures result = utterance;
  for (PhoneFeature& phone : result.phones) {
    if (phone.pause) continue;
    const WordCoefficients& word = plan.words.at(*phone.word_index);

    phone.duration_s = phone.duration_s * plan.g_dur * word.delta;
    if (!phone.voiced) continue;

    const double energy_scale = plan.g_energy * word.epsilon;
    if (energy_scale != 1.0) {
      phone.energy =
          RenormEnergy(DenormEnergy(phone.energy, stats) * energy_scale, stats);
    }
    const double shift_hz = plan.g_pitch_hz + word.pi_hz;
    if (shift_hz != 0.0) {
      const double hz = std::clamp(DenormF0(*phone.f0, stats) + shift_hz,
                                   stats.f0_min_hz, stats.f0_max_hz);
      phone.f0 = RenormF0(hz, stats);
    }
  }
  return result;
}

}  // namespace prosody
