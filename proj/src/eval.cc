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

#include "prosody/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

#include <boost/math/distributions/students_t.hpp>

#include "prosody/error.h"
#include "text_util.h"

namespace prosody {
namespace {

// floor(numerator / denominator * 10 + 1/2) / 10 in exact integer
// arithmetic, rendered with one decimal.
std::string RationalHalfUp1(long long numerator, long long denominator) {
  const long long tenths = (20 * numerator + denominator) / (2 * denominator);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

double TwoTailedP(double t, double df) {
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

[[noreturn]] void FailLine(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::kMalformedFile,
              "line " + std::to_string(line) + ": " + reason);
}

// Returns data rows (header checked and dropped) with their line numbers.
std::vector<std::pair<std::size_t, std::vector<std::string_view>>> ReadTable(
    std::string_view document, std::span<const std::string_view> header) {
  std::vector<std::pair<std::size_t, std::vector<std::string_view>>> rows;
  bool header_seen = false;
  const auto lines = internal::SplitLines(document);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (internal::Trim(lines[n]).empty()) continue;
    auto fields = internal::Split(lines[n], '\t');
    for (auto& f : fields) f = internal::Trim(f);
    if (!header_seen) {
      if (!std::equal(fields.begin(), fields.end(), header.begin(), header.end())) {
        std::string expected;
        for (std::string_view h : header) {
          expected += expected.empty() ? "" : "<TAB>";
          expected += h;
        }
        FailLine(n + 1, "expected header '" + expected + "'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != header.size()) {
      FailLine(n + 1, "expected " + std::to_string(header.size()) + " fields");
    }
    for (std::string_view f : fields) {
      if (f.empty()) FailLine(n + 1, "empty field");
    }
    rows.emplace_back(n + 1, std::move(fields));
  }
  if (!header_seen) FailLine(1, "missing header line");
  return rows;
}

std::vector<std::string> SortedSet(const std::vector<std::string>& systems) {
  std::vector<std::string> sorted = systems;
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

}  // namespace

std::string RoundHalfUp1(double value) {
  const double tenths = std::floor(value * 10.0 + 0.5);
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.1f", tenths / 10.0);
  return buffer;
}

std::vector<MosSummary> SummarizeMos(std::span<const RatingRecord> records,
                                     double confidence) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no ratings");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "confidence must be in (0, 1)");
  }
  std::map<std::string, std::vector<int>> by_system;
  for (const RatingRecord& r : records) {
    if (r.score < 1 || r.score > 5) {
      throw Error(ErrorCode::kInvalidInput,
                  "score " + std::to_string(r.score) + " outside 1..5");
    }
    by_system[r.system_id].push_back(r.score);
  }
  std::vector<MosSummary> out;
  for (const auto& [system, scores] : by_system) {
    if (scores.size() < 2) {
      throw Error(ErrorCode::kInsufficientData,
                  "system '" + system + "' has fewer than 2 ratings");
    }
    MosSummary s;
    s.system_id = system;
    s.n = scores.size();
    s.confidence = confidence;
    // Integer sums keep the result independent of record order.
    long long sum = 0;
    long long sum_sq = 0;
    for (int v : scores) {
      sum += v;
      sum_sq += static_cast<long long>(v) * v;
    }
    const auto count = static_cast<long long>(s.n);
    const double n = static_cast<double>(s.n);
    s.mean = static_cast<double>(sum) / n;
    const long long scatter = count * sum_sq - sum * sum;  // n * sum (v - mean)^2
    s.sd = std::sqrt(static_cast<double>(scatter) / (n * (n - 1.0)));
    boost::math::students_t dist(n - 1.0);
    const double t_crit =
        boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
    s.ci_halfwidth = t_crit * s.sd / std::sqrt(n);
    s.mean_display = RationalHalfUp1(sum, static_cast<long long>(s.n));
    s.ci_display = RoundHalfUp1(s.ci_halfwidth);
    out.push_back(std::move(s));
  }
  return out;
}

TTestResult PairedTTest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidInput, "paired samples differ in length");
  }
  if (a.size() < 2) throw Error(ErrorCode::kNoPairs, "need at least 2 pairs");
  TTestResult r;
  r.pairs = a.size();
  r.df = r.pairs - 1;
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double n = static_cast<double>(d.size());
  r.mean_difference = std::accumulate(d.begin(), d.end(), 0.0) / n;

  const bool all_equal =
      std::all_of(d.begin(), d.end(), [&](double v) { return v == d.front(); });
  if (all_equal) {
    if (d.front() == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
      r.flag = TTestFlag::kAllZeroDifferences;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), d.front());
      r.p = 0.0;
      r.flag = TTestFlag::kZeroVariance;
    }
    return r;
  }
  double sum_sq = 0.0;
  for (double v : d) sum_sq += (v - r.mean_difference) * (v - r.mean_difference);
  const double sd = std::sqrt(sum_sq / (n - 1.0));
  r.t = r.mean_difference / (sd / std::sqrt(n));
  r.p = TwoTailedP(r.t, static_cast<double>(r.df));
  return r;
}

TTestResult PairedTTest(std::span<const RatingRecord> records,
                        std::string_view system_a, std::string_view system_b) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, double> a_scores;
  std::map<Key, double> b_scores;
  for (const RatingRecord& r : records) {
    std::map<Key, double>* target = nullptr;
    if (r.system_id == system_a) target = &a_scores;
    if (r.system_id == system_b) target = &b_scores;
    if (target == nullptr) continue;
    if (!target->emplace(Key{r.stimulus_id, r.rater_id}, r.score).second) {
      throw Error(ErrorCode::kInvalidInput,
                  "duplicate rating for stimulus '" + r.stimulus_id +
                      "' by rater '" + r.rater_id + "' of system '" +
                      r.system_id + "'");
    }
  }
  std::vector<double> a;
  std::vector<double> b;
  for (const auto& [key, score] : a_scores) {
    const auto it = b_scores.find(key);
    if (it == b_scores.end()) continue;
    a.push_back(score);
    b.push_back(it->second);
  }
  if (a.size() < 2) {
    throw Error(ErrorCode::kNoPairs, "fewer than 2 matched (stimulus, rater) pairs");
  }
  return PairedTTest(a, b);
}

PreferenceSummary SummarizePreferences(std::span<const PreferenceRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no preference records");
  const std::vector<std::string> systems = SortedSet(records.front().systems_in_set);
  if (systems.size() != 3 ||
      std::adjacent_find(systems.begin(), systems.end()) != systems.end()) {
    throw Error(ErrorCode::kMixedSystemSets,
                "a preference set must hold 3 distinct systems");
  }
  std::map<std::string, std::size_t> wins;
  for (const std::string& s : systems) wins[s] = 0;
  for (const PreferenceRecord& r : records) {
    if (SortedSet(r.systems_in_set) != systems) {
      throw Error(ErrorCode::kMixedSystemSets,
                  "set '" + r.set_id + "' uses a different system set");
    }
    const auto it = wins.find(r.chosen_system);
    if (it == wins.end()) {
      throw Error(ErrorCode::kInvalidInput, "set '" + r.set_id + "': choice '" +
                                                r.chosen_system +
                                                "' is not in the set");
    }
    ++it->second;
  }
  PreferenceSummary summary;
  summary.total = records.size();
  for (const auto& [system, count] : wins) {
    SystemShare share;
    share.system_id = system;
    share.wins = count;
    share.fraction = static_cast<double>(count) / static_cast<double>(summary.total);
    share.percent_display = RationalHalfUp1(static_cast<long long>(count) * 100,
                                            static_cast<long long>(summary.total));
    summary.shares.push_back(std::move(share));
  }
  return summary;
}

std::map<std::string, PreferenceSummary> StyleBreakdown(
    std::span<const PreferenceRecord> records,
    const std::map<std::string, std::string>& style_of_set) {
  std::map<std::string, std::vector<PreferenceRecord>> groups;
  for (const PreferenceRecord& r : records) {
    const auto it = style_of_set.find(r.set_id);
    if (it == style_of_set.end()) {
      throw Error(ErrorCode::kUnlabeledSet, "set '" + r.set_id + "' has no style label");
    }
    groups[it->second].push_back(r);
  }
  std::map<std::string, PreferenceSummary> out;
  for (const auto& [style, group] : groups) {
    out.emplace(style, SummarizePreferences(group));
  }
  return out;
}

std::vector<RatingRecord> ParseRatings(std::string_view document) {
  static constexpr std::string_view kHeader[] = {"stimulus_id", "system_id",
                                                 "rater_id", "score"};
  std::vector<RatingRecord> records;
  for (const auto& [line, f] : ReadTable(document, kHeader)) {
    const auto score = internal::ParseInt(f[3]);
    if (!score || *score < 1 || *score > 5) FailLine(line, "score must be 1..5");
    records.push_back(RatingRecord{std::string(f[0]), std::string(f[1]),
                                   std::string(f[2]), static_cast<int>(*score)});
  }
  return records;
}

std::vector<PreferenceRecord> ParsePreferences(std::string_view document) {
  static constexpr std::string_view kHeader[] = {"set_id", "rater_id",
                                                 "chosen_system", "systems"};
  std::vector<PreferenceRecord> records;
  for (const auto& [line, f] : ReadTable(document, kHeader)) {
    PreferenceRecord r{std::string(f[0]), std::string(f[1]), std::string(f[2]), {}};
    for (std::string_view s : internal::Split(f[3], ',')) {
      s = internal::Trim(s);
      if (s.empty()) FailLine(line, "empty system name");
      r.systems_in_set.emplace_back(s);
    }
    if (r.systems_in_set.size() != 3) FailLine(line, "expected 3 systems");
    if (std::find(r.systems_in_set.begin(), r.systems_in_set.end(),
                  r.chosen_system) == r.systems_in_set.end()) {
      FailLine(line, "chosen system is not in the set");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::map<std::string, std::string> ParseStyleMap(std::string_view document) {
  static constexpr std::string_view kHeader[] = {"set_id", "style"};
  std::map<std::string, std::string> styles;
  for (const auto& [line, f] : ReadTable(document, kHeader)) {
    if (!styles.emplace(std::string(f[0]), std::string(f[1])).second) {
      FailLine(line, "duplicate set id '" + std::string(f[0]) + "'");
    }
  }
  return styles;
}

std::string FormatMos(const std::vector<MosSummary>& summaries) {
  std::string out;
  for (const MosSummary& s : summaries) {
    const std::string p = "mos." + s.system_id + ".";
    const std::string level = std::to_string(static_cast<int>(std::lround(s.confidence * 100)));
    out += p + "n\t" + std::to_string(s.n) + "\n";
    out += p + "mean\t" + s.mean_display + "\n";
    out += p + "ci" + level + "_t_halfwidth\t" + s.ci_display + "\n";
    out += p + "display\t" + s.mean_display + " +- " + s.ci_display + "\n";
    out += p + "mean_raw\t" + internal::FormatShortest(s.mean) + "\n";
    out += p + "ci" + level + "_t_halfwidth_raw\t" +
           internal::FormatShortest(s.ci_halfwidth) + "\n";
  }
  return out;
}

std::string FormatTTest(std::string_view system_a, std::string_view system_b,
                        const TTestResult& r) {
  const std::string p = "ttest." + std::string(system_a) + "_vs_" + std::string(system_b) + ".";
  std::string out;
  out += p + "pairs\t" + std::to_string(r.pairs) + "\n";
  out += p + "df\t" + std::to_string(r.df) + "\n";
  out += p + "mean_difference\t" + internal::FormatShortest(r.mean_difference) + "\n";
  out += p + "t\t" + internal::FormatShortest(r.t) + "\n";
  out += p + "p_two_tailed\t" + internal::FormatShortest(r.p) + "\n";
  const char* flag = r.flag == TTestFlag::kNone           ? "none"
                     : r.flag == TTestFlag::kZeroVariance ? "zero_variance"
                                                          : "all_zero_differences";
  out += p + "flag\t" + flag + "\n";
  return out;
}

std::string FormatPreferences(const PreferenceSummary& summary,
                              std::string_view prefix) {
  const std::string p(prefix);
  std::string out = p + ".total\t" + std::to_string(summary.total) + "\n";
  for (const SystemShare& s : summary.shares) {
    out += p + "." + s.system_id + ".wins\t" + std::to_string(s.wins) + "\n";
    out += p + "." + s.system_id + ".percent\t" + s.percent_display + "\n";
    out += p + "." + s.system_id + ".fraction\t" +
           internal::FormatShortest(s.fraction) + "\n";
  }
  return out;
}

std::string FormatStyleBreakdown(
    const std::map<std::string, PreferenceSummary>& breakdown) {
  std::string out;
  for (const auto& [style, summary] : breakdown) {
    out += FormatPreferences(summary, "style." + style);
  }
  return out;
}

}  // namespace prosody
