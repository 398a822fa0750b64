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

// Phone-level acoustic features, the tab-separated feature file format,
// word tokenization and per-speaker normalization statistics.

#ifndef PROSODY_FEATURES_H_
#define PROSODY_FEATURES_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace prosody {

// Whether log-F0 / log-energy values are raw (log-Hz, log of the l2 frame
// norm) or speaker-normalized (z-scores of the raw values).
enum class FeatureScale { kRaw, kNormalized };

struct PhoneFeature {
  std::string label;
  // Index into UtteranceFeatures::words. Absent exactly for pauses.
  std::optional<std::size_t> word_index;
  double duration_s = 0.0;
  // Log-F0; present iff voiced.
  std::optional<double> f0;
  double energy = 0.0;
  bool voiced = false;
  bool pause = false;

  bool operator==(const PhoneFeature&) const = default;
};

struct Word {
  std::string surface;  // as written, outer punctuation removed
  std::string key;      // lowercase match key

  bool operator==(const Word&) const = default;
};

struct UtteranceFeatures {
  std::string id;
  std::string speaker_id;
  FeatureScale scale = FeatureScale::kNormalized;
  std::string text;
  // Always TokenizeWords(text); kept alongside the phones for alignment.
  std::vector<Word> words;
  std::vector<PhoneFeature> phones;

  double TotalDuration() const;
  bool operator==(const UtteranceFeatures&) const = default;
};

struct SpeakerStats {
  double mu_logf0 = 0.0;
  double sigma_logf0 = 1.0;
  double mu_loge = 0.0;
  double sigma_loge = 1.0;
  double f0_min_hz = 0.0;
  double f0_max_hz = 0.0;

  bool operator==(const SpeakerStats&) const = default;
};

// Splits on whitespace and strips leading/trailing ASCII punctuation from
// each token. Word-internal punctuation (it's, well-known) is kept. Tokens
// that are empty after stripping are dropped.
std::vector<Word> TokenizeWords(std::string_view text);

// Match key of a single token, or the empty string if the token is pure
// punctuation.
std::string WordKey(std::string_view token);

// Throws Error(kInvalidInput) if any feature invariant is violated. The
// message names the utterance and the reason.
void ValidateUtterance(const UtteranceFeatures& utterance);

// Feature file:
//   #prosody-features<TAB>1
//   #utterance<TAB>id<TAB>speaker<TAB>raw|norm<TAB>text
//   label<TAB>word_index|-<TAB>duration_s<TAB>f0|-<TAB>energy<TAB>voiced<TAB>pause
// Floats are written with six decimals. Blank lines are ignored on input.
std::vector<UtteranceFeatures> ParseFeatures(std::string_view document);
std::string SerializeFeatures(const std::vector<UtteranceFeatures>& utterances);

std::vector<UtteranceFeatures> ReadFeatureFile(const std::string& path);
void WriteFeatureFile(const std::string& path,
                      const std::vector<UtteranceFeatures>& utterances);

struct StatsOptions {
  double min_duration_s = 1.5;
  double low_percentile = 5.0;
  double high_percentile = 95.0;
};

// Computes normalization statistics from raw-scale utterances. Utterances
// shorter than min_duration_s are skipped entirely. Log-F0 statistics use
// voiced phones; log-energy statistics use every non-pause phone. The F0
// range is the [low, high] percentile pair of voiced F0 in Hz (linear
// interpolation between order statistics).
SpeakerStats ComputeSpeakerStats(const std::vector<UtteranceFeatures>& utterances,
                                 const StatsOptions& options = {});

void ValidateStats(const SpeakerStats& stats);

// key<TAB>value per field, shortest round-trip decimal representation.
SpeakerStats ParseSpeakerStats(std::string_view document);
std::string SerializeSpeakerStats(const SpeakerStats& stats);

SpeakerStats ReadStatsFile(const std::string& path);
void WriteStatsFile(const std::string& path, const SpeakerStats& stats);

}  // namespace prosody

#endif  // PROSODY_FEATURES_H_
