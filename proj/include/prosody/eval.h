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

// Listening-test aggregation: MOS with t-based confidence intervals, paired
// t-tests, and A/B/C preference shares.

#ifndef PROSODY_EVAL_H_
#define PROSODY_EVAL_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prosody {

struct RatingRecord {
  std::string stimulus_id;
  std::string system_id;
  std::string rater_id;
  int score = 0;  // 1..5

  bool operator==(const RatingRecord&) const = default;
};

struct PreferenceRecord {
  std::string set_id;
  std::string rater_id;
  std::string chosen_system;
  std::vector<std::string> systems_in_set;  // exactly 3

  bool operator==(const PreferenceRecord&) const = default;
};

struct MosSummary {
  std::string system_id;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  // t(two-tailed, confidence, n - 1) * sd / sqrt(n).
  double ci_halfwidth = 0.0;
  double confidence = 0.95;
  // Display values, rounded half-up to one decimal.
  std::string mean_display;
  std::string ci_display;
};

// One summary per system, ordered by system id. Throws kInsufficientData if
// any system has fewer than two ratings, kEmptyInput for no records.
std::vector<MosSummary> SummarizeMos(std::span<const RatingRecord> records,
                                     double confidence = 0.95);

enum class TTestFlag { kNone, kZeroVariance, kAllZeroDifferences };

struct TTestResult {
  double t = 0.0;
  double p = 1.0;  // two-tailed
  std::size_t df = 0;
  std::size_t pairs = 0;
  double mean_difference = 0.0;
  TTestFlag flag = TTestFlag::kNone;
};

// Paired t-test on aligned samples a[i], b[i]. Throws kNoPairs for fewer
// than two pairs. All differences zero: t = 0, p = 1, flagged. All
// differences equal and nonzero: t = +-inf, p = 0, flagged.
TTestResult PairedTTest(std::span<const double> a, std::span<const double> b);

// Pairs ratings of two systems by (stimulus_id, rater_id); unmatched
// ratings are ignored.
TTestResult PairedTTest(std::span<const RatingRecord> records,
                        std::string_view system_a, std::string_view system_b);

struct SystemShare {
  std::string system_id;
  std::size_t wins = 0;
  double fraction = 0.0;
  std::string percent_display;  // 100 * wins / total, half-up, 1 decimal
};

struct PreferenceSummary {
  std::size_t total = 0;
  std::vector<SystemShare> shares;  // ordered by system id
};

// Throws kEmptyInput, kMixedSystemSets (records disagree on the system set,
// or a set does not hold 3 distinct systems), kInvalidInput (choice not in
// its set).
PreferenceSummary SummarizePreferences(std::span<const PreferenceRecord> records);

// Per-style summaries keyed by style label. Throws kUnlabeledSet.
std::map<std::string, PreferenceSummary> StyleBreakdown(
    std::span<const PreferenceRecord> records,
    const std::map<std::string, std::string>& style_of_set);

// value rounded half-up to one decimal, e.g. 51.45 -> "51.5".
std::string RoundHalfUp1(double value);

// Data files: a header line, then tab-separated rows.
//   ratings:     stimulus_id  system_id  rater_id  score
//   preferences: set_id  rater_id  chosen_system  systems (comma-separated)
//   styles:      set_id  style
std::vector<RatingRecord> ParseRatings(std::string_view document);
std::vector<PreferenceRecord> ParsePreferences(std::string_view document);
std::map<std::string, std::string> ParseStyleMap(std::string_view document);

// Tab-separated key/value summary rows.
std::string FormatMos(const std::vector<MosSummary>& summaries);
std::string FormatTTest(std::string_view system_a, std::string_view system_b,
                        const TTestResult& result);
std::string FormatPreferences(const PreferenceSummary& summary,
                              std::string_view prefix = "pref");
std::string FormatStyleBreakdown(
    const std::map<std::string, PreferenceSummary>& breakdown);

}  // namespace prosody

#endif  // PROSODY_EVAL_H_
