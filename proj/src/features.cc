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

#include "prosody/features.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <span>

#include "prosody/error.h"
#include "text_util.h"

namespace prosody {
namespace {

constexpr std::string_view kMagic = "#prosody-features\t1";
constexpr std::string_view kUtterancePrefix = "#utterance\t";

bool IsAsciiPunct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

bool IsAsciiSpace(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool HasWhitespace(std::string_view text) {
  return std::any_of(text.begin(), text.end(), IsAsciiSpace);
}

std::string_view StripPunct(std::string_view token) {
  while (!token.empty() && IsAsciiPunct(token.front())) token.remove_prefix(1);
  while (!token.empty() && IsAsciiPunct(token.back())) token.remove_suffix(1);
  return token;
}

[[noreturn]] void FailUtterance(const UtteranceFeatures& utterance,
                                std::size_t line, const std::string& reason) {
  std::string message = "utterance '" + utterance.id + "'";
  if (line > 0) message += " (line " + std::to_string(line) + ")";
  throw Error(ErrorCode::kInvalidInput, message + ": " + reason);
}

// phone_lines[i] is the source line of phone i, or empty when the utterance
// did not come from a file.
void CheckUtterance(const UtteranceFeatures& u, std::size_t header_line,
                    std::span<const std::size_t> phone_lines) {
  const auto line_of = [&](std::size_t i) -> std::size_t {
    return i < phone_lines.size() ? phone_lines[i] : 0;
  };
  if (u.id.empty() || HasWhitespace(u.id)) {
    FailUtterance(u, header_line, "id must be non-empty without whitespace");
  }
  if (u.speaker_id.empty() || HasWhitespace(u.speaker_id)) {
    FailUtterance(u, header_line,
                  "speaker id must be non-empty without whitespace");
  }
  if (u.text.find_first_of("\t\n\r") != std::string::npos) {
    FailUtterance(u, header_line, "text must not contain tabs or newlines");
  }
  if (u.words != TokenizeWords(u.text)) {
    FailUtterance(u, header_line, "word list does not match the text");
  }
  if (u.phones.empty()) FailUtterance(u, header_line, "no phones");

  const std::size_t word_count = u.words.size();
  std::vector<bool> referenced(word_count, false);
  std::optional<std::size_t> previous_word;
  for (std::size_t i = 0; i < u.phones.size(); ++i) {
    const PhoneFeature& p = u.phones[i];
    const std::size_t line = line_of(i);
    const std::string where = "phone " + std::to_string(i) + " ('" + p.label + "')";
    if (p.label.empty() || HasWhitespace(p.label)) {
      FailUtterance(u, line, where + ": label must be non-empty without whitespace");
    }
    if (!std::isfinite(p.duration_s) || p.duration_s <= 0.0) {
      FailUtterance(u, line, where + ": duration must be > 0");
    }
    if (!std::isfinite(p.energy)) {
      FailUtterance(u, line, where + ": energy must be finite");
    }
    if (p.voiced && !p.f0.has_value()) {
      FailUtterance(u, line, where + ": voiced phone lacks an F0 value");
    }
    if (!p.voiced && p.f0.has_value()) {
      FailUtterance(u, line, where + ": unvoiced phone carries an F0 value");
    }
    if (p.f0.has_value() && !std::isfinite(*p.f0)) {
      FailUtterance(u, line, where + ": F0 must be finite");
    }
    if (p.pause) {
      if (p.word_index.has_value()) {
        FailUtterance(u, line, where + ": pause must not belong to a word");
      }
      if (p.voiced) FailUtterance(u, line, where + ": pause cannot be voiced");
      continue;
    }
    if (!p.word_index.has_value()) {
      FailUtterance(u, line, where + ": non-pause phone lacks a word index");
    }
    const std::size_t j = *p.word_index;
    if (j >= word_count) {
      FailUtterance(u, line, where + ": word index " + std::to_string(j) +
                                 " out of range (" +
                                 std::to_string(word_count) + " words)");
    }
    if (previous_word.has_value() && j < *previous_word) {
      FailUtterance(u, line, where + ": word indices must be non-decreasing");
    }
    previous_word = j;
    referenced[j] = true;
  }
  for (std::size_t j = 0; j < word_count; ++j) {
    if (!referenced[j]) {
      FailUtterance(u, header_line, "word " + std::to_string(j) + " ('" +
                                        u.words[j].surface +
                                        "') has no phones");
    }
  }
}

[[noreturn]] void FailLine(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::kMalformedFile,
              "line " + std::to_string(line) + ": " + reason);
}

bool ParseFlag(std::string_view field, std::size_t line, std::string_view name) {
  if (field == "0") return false;
  if (field == "1") return true;
  FailLine(line, std::string(name) + " must be 0 or 1");
}

double ParseField(std::string_view field, std::size_t line,
                  std::string_view name) {
  const auto value = internal::ParseDouble(field);
  if (!value) FailLine(line, "bad " + std::string(name) + " value '" +
                                 std::string(field) + "'");
  return *value;
}

double Mean(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double SampleSd(std::span<const double> values, double mean) {
  double sum_sq = 0.0;
  for (double v : values) sum_sq += (v - mean) * (v - mean);
  return std::sqrt(sum_sq / static_cast<double>(values.size() - 1));
}

double Percentile(std::span<const double> sorted, double percent) {
  const double rank = percent / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(rank));
  const std::size_t upper = std::min(lower + 1, sorted.size() - 1);
  const double fraction = rank - static_cast<double>(lower);
  return sorted[lower] + fraction * (sorted[upper] - sorted[lower]);
}

}  // namespace

double UtteranceFeatures::TotalDuration() const {
  double total = 0.0;
  for (const PhoneFeature& p : phones) total += p.duration_s;
  return total;
}

std::string WordKey(std::string_view token) {
  std::string key(StripPunct(token));
  for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return key;
}

std::vector<Word> TokenizeWords(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsAsciiSpace(text[i])) ++i;
    std::size_t end = i;
    while (end < text.size() && !IsAsciiSpace(text[end])) ++end;
    const std::string_view surface = StripPunct(text.substr(i, end - i));
    if (!surface.empty()) {
      words.push_back(Word{std::string(surface), WordKey(surface)});
    }
    i = end;
  }
  return words;
}

void ValidateUtterance(const UtteranceFeatures& utterance) {
  CheckUtterance(utterance, 0, {});
}

std::vector<UtteranceFeatures> ParseFeatures(std::string_view document) {
  const auto lines = internal::SplitLines(document);
  std::vector<UtteranceFeatures> utterances;
  std::vector<std::size_t> phone_lines;
  std::size_t header_line = 0;
  bool seen_magic = false;

  const auto finish = [&]() {
    if (utterances.empty()) return;
    CheckUtterance(utterances.back(), header_line, phone_lines);
  };

  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    const std::string_view line = lines[n];
    if (internal::Trim(line).empty()) continue;
    if (!seen_magic) {
      if (line != kMagic) {
        FailLine(line_no, "expected '#prosody-features<TAB>1' header");
      }
      seen_magic = true;
      continue;
    }
    if (internal::StartsWith(line, kUtterancePrefix)) {
      finish();
      const auto fields = internal::Split(line.substr(kUtterancePrefix.size()), '\t');
      if (fields.size() != 4) {
        FailLine(line_no, "utterance header needs id, speaker, scale and text");
      }
      UtteranceFeatures u;
      u.id = std::string(fields[0]);
      u.speaker_id = std::string(fields[1]);
      if (fields[2] == "raw") {
        u.scale = FeatureScale::kRaw;
      } else if (fields[2] == "norm") {
        u.scale = FeatureScale::kNormalized;
      } else {
        FailLine(line_no, "scale must be 'raw' or 'norm'");
      }
      u.text = std::string(fields[3]);
      u.words = TokenizeWords(u.text);
      utterances.push_back(std::move(u));
      phone_lines.clear();
      header_line = line_no;
      continue;
    }
    if (line.front() == '#') FailLine(line_no, "unknown directive");
    if (utterances.empty()) FailLine(line_no, "phone row before any utterance header");

    const auto fields = internal::Split(line, '\t');
    if (fields.size() != 7) {
      FailLine(line_no, "phone row needs 7 tab-separated fields, got " +
                            std::to_string(fields.size()));
    }
    PhoneFeature phone;
    phone.label = std::string(fields[0]);
    if (fields[1] != "-") {
      const auto index = internal::ParseInt(fields[1]);
      if (!index || *index < 0) FailLine(line_no, "bad word index");
      phone.word_index = static_cast<std::size_t>(*index);
    }
    phone.duration_s = ParseField(fields[2], line_no, "duration");
    if (fields[3] != "-") phone.f0 = ParseField(fields[3], line_no, "f0");
    phone.energy = ParseField(fields[4], line_no, "energy");
    phone.voiced = ParseFlag(fields[5], line_no, "voiced");
    phone.pause = ParseFlag(fields[6], line_no, "pause");
    utterances.back().phones.push_back(std::move(phone));
    phone_lines.push_back(line_no);
  }
  finish();
  return utterances;
}

std::string SerializeFeatures(const std::vector<UtteranceFeatures>& utterances) {
  std::string out(kMagic);
  out += '\n';
  for (const UtteranceFeatures& u : utterances) {
    out += kUtterancePrefix;
    out += u.id + '\t' + u.speaker_id + '\t';
    out += u.scale == FeatureScale::kRaw ? "raw" : "norm";
    out += '\t' + u.text + '\n';
    for (const PhoneFeature& p : u.phones) {
      out += p.label;
      out += '\t';
      out += p.word_index ? std::to_string(*p.word_index) : "-";
      out += '\t' + internal::FormatFixed6(p.duration_s) + '\t';
      out += p.f0 ? internal::FormatFixed6(*p.f0) : "-";
      out += '\t' + internal::FormatFixed6(p.energy);
      out += p.voiced ? "\t1" : "\t0";
      out += p.pause ? "\t1\n" : "\t0\n";
    }
  }
  return out;
}

std::vector<UtteranceFeatures> ReadFeatureFile(const std::string& path) {
  try {
    return ParseFeatures(internal::ReadFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void WriteFeatureFile(const std::string& path,
                      const std::vector<UtteranceFeatures>& utterances) {
  internal::WriteFile(path, SerializeFeatures(utterances));
}

SpeakerStats ComputeSpeakerStats(const std::vector<UtteranceFeatures>& utterances,
                                 const StatsOptions& options) {
  if (!(options.low_percentile >= 0.0 &&
        options.low_percentile < options.high_percentile &&
        options.high_percentile <= 100.0)) {
    throw Error(ErrorCode::kInvalidInput,
                "percentiles must satisfy 0 <= low < high <= 100");
  }
  std::vector<double> log_f0;
  std::vector<double> log_energy;
  for (const UtteranceFeatures& u : utterances) {
    if (u.scale != FeatureScale::kRaw) {
      throw Error(ErrorCode::kInvalidInput,
                  "utterance '" + u.id + "': statistics need raw features");
    }
    if (u.TotalDuration() < options.min_duration_s) continue;
    for (const PhoneFeature& p : u.phones) {
      if (p.pause) continue;
      if (!std::isfinite(p.energy) || (p.f0 && !std::isfinite(*p.f0))) {
        throw Error(ErrorCode::kInvalidInput,
                    "utterance '" + u.id + "': non-finite feature value");
      }
      log_energy.push_back(p.energy);
      if (p.voiced && p.f0) log_f0.push_back(*p.f0);
    }
  }
  if (log_f0.size() < 2) {
    throw Error(ErrorCode::kDegenerateStats,
                "fewer than 2 voiced phones after duration filtering");
  }
  if (log_energy.size() < 2) {
    throw Error(ErrorCode::kDegenerateStats,
                "fewer than 2 non-pause phones after duration filtering");
  }

  SpeakerStats stats;
  stats.mu_logf0 = Mean(log_f0);
  stats.sigma_logf0 = SampleSd(log_f0, stats.mu_logf0);
  stats.mu_loge = Mean(log_energy);
  stats.sigma_loge = SampleSd(log_energy, stats.mu_loge);
  if (!(stats.sigma_logf0 > 0.0)) {
    throw Error(ErrorCode::kDegenerateStats, "log-F0 has zero variance");
  }
  if (!(stats.sigma_loge > 0.0)) {
    throw Error(ErrorCode::kDegenerateStats, "log-energy has zero variance");
  }

  std::vector<double> hz(log_f0.size());
  std::transform(log_f0.begin(), log_f0.end(), hz.begin(),
                 [](double v) { return std::exp(v); });
  std::sort(hz.begin(), hz.end());
  stats.f0_min_hz = Percentile(hz, options.low_percentile);
  stats.f0_max_hz = Percentile(hz, options.high_percentile);
  if (!(stats.f0_min_hz < stats.f0_max_hz)) {
    throw Error(ErrorCode::kDegenerateStats,
                "F0 percentile range is empty");
  }
  return stats;
}

void ValidateStats(const SpeakerStats& s) {
  const bool finite = std::isfinite(s.mu_logf0) && std::isfinite(s.sigma_logf0) &&
                      std::isfinite(s.mu_loge) && std::isfinite(s.sigma_loge) &&
                      std::isfinite(s.f0_min_hz) && std::isfinite(s.f0_max_hz);
  if (!finite) throw Error(ErrorCode::kInvalidInput, "non-finite speaker statistic");
  if (!(s.sigma_logf0 > 0.0) || !(s.sigma_loge > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "speaker sigmas must be > 0");
  }
  if (!(s.f0_min_hz > 0.0 && s.f0_min_hz < s.f0_max_hz)) {
    throw Error(ErrorCode::kInvalidInput,
                "speaker F0 range must satisfy 0 < min < max");
  }
}

SpeakerStats ParseSpeakerStats(std::string_view document) {
  SpeakerStats stats;
  const std::map<std::string_view, double*> fields = {
      {"mu_logf0", &stats.mu_logf0},   {"sigma_logf0", &stats.sigma_logf0},
      {"mu_loge", &stats.mu_loge},     {"sigma_loge", &stats.sigma_loge},
      {"f0_min_hz", &stats.f0_min_hz}, {"f0_max_hz", &stats.f0_max_hz},
  };
  std::map<std::string_view, bool> seen;
  const auto lines = internal::SplitLines(document);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    if (internal::Trim(lines[n]).empty()) continue;
    const auto parts = internal::Split(lines[n], '\t');
    if (parts.size() != 2) FailLine(line_no, "expected key<TAB>value");
    const auto it = fields.find(parts[0]);
    if (it == fields.end()) {
      FailLine(line_no, "unknown key '" + std::string(parts[0]) + "'");
    }
    if (seen[it->first]) FailLine(line_no, "duplicate key '" + std::string(parts[0]) + "'");
    seen[it->first] = true;
    *it->second = ParseField(parts[1], line_no, it->first);
  }
  for (const auto& [key, ptr] : fields) {
    if (!seen[key]) {
      throw Error(ErrorCode::kMalformedFile,
                  "missing key '" + std::string(key) + "'");
    }
  }
  ValidateStats(stats);
  return stats;
}

std::string SerializeSpeakerStats(const SpeakerStats& s) {
  std::string out;
  const auto add = [&](std::string_view key, double value) {
    out += key;
    out += '\t' + internal::FormatShortest(value) + '\n';
  };
  add("mu_logf0", s.mu_logf0);
  add("sigma_logf0", s.sigma_logf0);
  add("mu_loge", s.mu_loge);
  add("sigma_loge", s.sigma_loge);
  add("f0_min_hz", s.f0_min_hz);
  add("f0_max_hz", s.f0_max_hz);
  return out;
}

SpeakerStats ReadStatsFile(const std::string& path) {
  try {
    return ParseSpeakerStats(internal::ReadFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void WriteStatsFile(const std::string& path, const SpeakerStats& stats) {
  internal::WriteFile(path, SerializeSpeakerStats(stats));
}

}  // namespace prosody
