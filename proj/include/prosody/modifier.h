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

// De-normalize, modify and re-normalize phone features according to a
// ModificationPlan.

#ifndef PROSODY_MODIFIER_H_
#define PROSODY_MODIFIER_H_

#include "prosody/features.h"
#include "prosody/mapping.h"

namespace prosody {

// exp(value * sigma + mu), in Hz.
double DenormF0(double f0_norm, const SpeakerStats& stats);
// (ln(hz) - mu) / sigma. Throws kNonPositiveF0 for hz <= 0.
double RenormF0(double hz, const SpeakerStats& stats);

double DenormEnergy(double energy_norm, const SpeakerStats& stats);
// Throws kNonPositiveF0 for a non-positive linear energy as well; the
// error code names the failing domain, not the feature.
double RenormEnergy(double linear, const SpeakerStats& stats);

// Applies the plan to a normalized utterance:
//   * pauses are copied unchanged;
//   * every other phone's duration is scaled by g_dur * delta_j;
//   * voiced phones get energy scaled by g_energy * epsilon_j in the linear
//     domain, and F0 shifted by g_pitch_hz + pi_j in Hz, then clamped to
//     [f0_min_hz, f0_max_hz];
//   * unvoiced phones keep their F0 and energy.
// A unit energy factor or a zero pitch shift leaves the value bit-identical.
// Throws kPlanShapeMismatch when the plan's word count differs from the
// utterance's.
UtteranceFeatures ApplyPlan(const UtteranceFeatures& utterance,
                            const SpeakerStats& stats,
                            const ModificationPlan& plan);

}  // namespace prosody

#endif  // PROSODY_MODIFIER_H_
