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
#include <array>
#include <cctype>
#include <cmath>
#include <map>

#include "prosody/error.h"
#include "text_util.h"

namespace prosody {
namespace {

using internal::StartsWith;
using internal::Trim;

constexpr std::array<std::string_view, 3> kKeys = {"duration", "pitch", "energy"};

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool IsSeparator(char c) { return IsSpace(c) || c == ',' || c == ';'; }

// Keyword followed by whitespace, ':' or end of line.
bool HasKeyword(std::string_view line, std::string_view keyword) {
  if (!StartsWith(line, keyword)) return false;
  if (line.size() == keyword.size()) return true;
  const char next = line[keyword.size()];
  return IsSpace(next) || next == ':';
}

struct ValueTriple {
  std::array<double, 3> values{};  // duration, pitch, energy
  bool ok = false;
};

class Parser {
 public:
  Parser(std::string_view text, const std::vector<Word>& expected)
      : lines_(internal::SplitLines(text)), expected_(expected),
        seen_(expected.size(), false), seen_line_(expected.size(), 0) {}

  ParseOutcome Run() {
    enum class State { kPreamble, kReasoning, kBody } state = State::kPreamble;
    bool have_reasoning = false;
    std::vector<std::string> reasoning_lines;
    for (std::size_t n = 0; n < lines_.size(); ++n) {
      const std::size_t line_no = n + 1;
      const std::string_view line = Trim(lines_[n]);
      if (line.empty()) continue;
      if (HasKeyword(line, "REASONING")) {
        const std::size_t colon = line.find(':');
        if (have_reasoning || state == State::kBody) {
          Add(DiagnosticKind::kUnparseableLine, line_no,
              "unexpected REASONING line");
        } else if (colon == std::string_view::npos ||
                   !Trim(line.substr(9, colon - 9)).empty()) {
          Add(DiagnosticKind::kUnparseableLine, line_no,
              "REASONING must be followed by ':'");
        } else {
          have_reasoning = true;
          state = State::kReasoning;
          const std::string_view first = Trim(line.substr(colon + 1));
          if (!first.empty()) reasoning_lines.emplace_back(first);
        }
      } else if (HasKeyword(line, "GLOBAL")) {
        if (global_line_ != 0) {
          Add(DiagnosticKind::kUnparseableLine, line_no,
              "duplicate GLOBAL line (first on line " +
                  std::to_string(global_line_) + ")");
          continue;
        }
        global_line_ = line_no;
        ParseGlobal(line, line_no);
        state = State::kBody;
      } else if (HasKeyword(line, "WORD")) {
        if (global_line_ == 0) {
          Add(DiagnosticKind::kUnparseableLine, line_no,
              "WORD line before the GLOBAL line");
        }
        ParseWord(line, line_no);
        state = State::kBody;
      } else if (state == State::kReasoning) {
        reasoning_lines.emplace_back(line);
      } else {
        Add(DiagnosticKind::kUnparseableLine, line_no,
            "unrecognized line '" + std::string(line.substr(0, 60)) + "'");
      }
    }
    const std::size_t end_line = lines_.size() + 1;
    if (global_line_ == 0) {
      Add(DiagnosticKind::kMissingGlobal,
          first_word_line_ ? first_word_line_ : end_line, "no GLOBAL line");
    }
    for (std::size_t j = 0; j < expected_.size(); ++j) {
      if (seen_[j]) continue;
      std::size_t where = end_line;
      for (std::size_t k = j + 1; k < expected_.size(); ++k) {
        if (seen_[k]) {
          where = seen_line_[k];
          break;
        }
      }
      Add(DiagnosticKind::kWordCountMismatch, where,
          "missing WORD line for index " + std::to_string(j) + " ('" +
              expected_[j].surface + "')");
    }
    std::stable_sort(diagnostics_.begin(), diagnostics_.end(),
                     [](const ParseDiagnostic& a, const ParseDiagnostic& b) {
                       return a.line < b.line;
                     });

    ParseOutcome outcome;
    const bool fatal =
        std::any_of(diagnostics_.begin(), diagnostics_.end(),
                    [](const ParseDiagnostic& d) { return d.IsFatal(); });
    if (!fatal) {
      for (std::size_t i = 0; i < reasoning_lines.size(); ++i) {
        if (i > 0) suggestion_.reasoning += '\n';
        suggestion_.reasoning += reasoning_lines[i];
      }
      std::sort(suggestion_.words.begin(), suggestion_.words.end(),
                [](const WordSuggestion& a, const WordSuggestion& b) {
                  return a.index < b.index;
                });
      outcome.suggestion = std::move(suggestion_);
    }
    outcome.diagnostics = std::move(diagnostics_);
    return outcome;
  }

 private:
  void Add(DiagnosticKind kind, std::size_t line, std::string detail,
           bool clamped = false) {
    diagnostics_.push_back(ParseDiagnostic{kind, line, std::move(detail), clamped});
  }

  // Parses "key=value" pairs after the colon. Reports problems against
  // 'what' (e.g. "GLOBAL", "WORD 3").
  ValueTriple ParseValues(std::string_view text, std::size_t line_no,
                          const std::string& what, double lo, double hi) {
    ValueTriple out;
    std::array<bool, 3> have{};
    bool structural_ok = true;
    bool numeric_ok = true;
    std::size_t i = 0;
    while (true) {
      while (i < text.size() && IsSeparator(text[i])) ++i;
      if (i >= text.size()) break;
      std::size_t key_end = i;
      while (key_end < text.size() &&
             (std::isalpha(static_cast<unsigned char>(text[key_end])) ||
              text[key_end] == '_')) {
        ++key_end;
      }
      const std::string_view key = text.substr(i, key_end - i);
      std::size_t k = key_end;
      while (k < text.size() && IsSpace(text[k])) ++k;
      if (key.empty() || k >= text.size() || text[k] != '=') {
        Add(DiagnosticKind::kUnparseableLine, line_no,
            what + ": expected key=value near '" +
                std::string(text.substr(i, 20)) + "'");
        return out;
      }
      ++k;
      while (k < text.size() && IsSpace(text[k])) ++k;
      std::size_t value_end = k;
      while (value_end < text.size() && !IsSeparator(text[value_end])) ++value_end;
      const std::string_view value_text = text.substr(k, value_end - k);
      i = value_end;

      const auto slot = std::find(kKeys.begin(), kKeys.end(), key);
      if (slot == kKeys.end()) {
        Add(DiagnosticKind::kUnparseableLine, line_no,
            what + ": unknown key '" + std::string(key) + "'");
        structural_ok = false;
        continue;
      }
      const auto idx = static_cast<std::size_t>(slot - kKeys.begin());
      if (have[idx]) {
        Add(DiagnosticKind::kUnparseableLine, line_no,
            what + ": duplicate key '" + std::string(key) + "'");
        structural_ok = false;
        continue;
      }
      have[idx] = true;
      const auto parsed = internal::ParseDouble(value_text);
      if (!parsed) {
        Add(DiagnosticKind::kValueNotNumeric, line_no,
            what + ": " + std::string(key) + " value '" +
                std::string(value_text) + "' is not a number");
        numeric_ok = false;
        continue;
      }
      double v = *parsed;
      if (v < lo || v > hi) {
        const double clamped = std::clamp(v, lo, hi);
        Add(DiagnosticKind::kValueOutOfRange, line_no,
            what + ": " + std::string(key) + "=" + std::string(value_text) +
                " outside [" + internal::FormatShortest(lo) + ", " +
                internal::FormatShortest(hi) + "], clamped to " +
                internal::FormatShortest(clamped),
            /*clamped=*/true);
        v = clamped;
      }
      out.values[idx] = v;
    }
    for (std::size_t idx = 0; idx < kKeys.size(); ++idx) {
      if (!have[idx]) {
        Add(DiagnosticKind::kUnparseableLine, line_no,
            what + ": missing " + std::string(kKeys[idx]) + "=<value>");
        structural_ok = false;
      }
    }
    out.ok = structural_ok && numeric_ok;
    return out;
  }

  void ParseGlobal(std::string_view line, std::size_t line_no) {
    std::string_view rest = Trim(line.substr(6));
    if (rest.empty() || rest.front() != ':') {
      Add(DiagnosticKind::kUnparseableLine, line_no, "GLOBAL must be followed by ':'");
      return;
    }
    const ValueTriple values = ParseValues(rest.substr(1), line_no, "GLOBAL",
                                           kGlobalScaleMin, kGlobalScaleMax);
    suggestion_.global_duration = values.values[0];
    suggestion_.global_pitch = values.values[1];
    suggestion_.global_energy = values.values[2];
  }

  void ParseWord(std::string_view line, std::size_t line_no) {
    std::string_view rest = Trim(line.substr(4));
    std::size_t index_end = 0;
    while (index_end < rest.size() && !IsSpace(rest[index_end]) &&
           rest[index_end] != ':') {
      ++index_end;
    }
    const auto index = internal::ParseInt(rest.substr(0, index_end));
    if (!index || *index < 0) {
      Add(DiagnosticKind::kUnparseableLine, line_no,
          "WORD must be followed by a non-negative index");
      return;
    }
    rest = rest.substr(index_end);
    const std::size_t equals = rest.find('=');
    const std::size_t colon = rest.substr(0, equals).rfind(':');
    if (colon == std::string_view::npos) {
      Add(DiagnosticKind::kUnparseableLine, line_no,
          "WORD " + std::to_string(*index) + ": expected '<word>: key=value ...'");
      return;
    }
    const std::string_view word = Trim(rest.substr(0, colon));
    const auto j = static_cast<std::size_t>(*index);
    const std::string what = "WORD " + std::to_string(j);
    if (first_word_line_ == 0) first_word_line_ = line_no;

    bool placed = true;
    if (j >= expected_.size()) {
      Add(DiagnosticKind::kWordCountMismatch, line_no,
          what + " ('" + std::string(word) + "') is beyond the " +
              std::to_string(expected_.size()) + " words of the text");
      placed = false;
    } else if (seen_[j]) {
      Add(DiagnosticKind::kDuplicateWordIndex, line_no,
          what + " already given on line " + std::to_string(seen_line_[j]));
      placed = false;
    } else {
      if (last_index_ && j < *last_index_) {
        Add(DiagnosticKind::kUnparseableLine, line_no,
            what + " is out of order (after index " +
                std::to_string(*last_index_) + ")");
      }
      seen_[j] = true;
      seen_line_[j] = line_no;
      last_index_ = std::max(last_index_.value_or(0), j);
      if (WordKey(word) != expected_[j].key) {
        Add(DiagnosticKind::kWordIdentityMismatch, line_no,
            what + ": expected '" + expected_[j].surface + "', got '" +
                std::string(word) + "'");
      }
    }
    const ValueTriple values = ParseValues(rest.substr(colon + 1), line_no, what,
                                           kLocalScaleMin, kLocalScaleMax);
    if (placed) {
      suggestion_.words.push_back(WordSuggestion{j, expected_[j].key,
                                                 values.values[0],
                                                 values.values[1],
                                                 values.values[2]});
    }
  }

  std::vector<std::string_view> lines_;
  const std::vector<Word>& expected_;
  std::vector<bool> seen_;
  std::vector<std::size_t> seen_line_;
  std::optional<std::size_t> last_index_;
  std::size_t global_line_ = 0;
  std::size_t first_word_line_ = 0;
  LlmScaleSuggestion suggestion_;
  std::vector<ParseDiagnostic> diagnostics_;
};

}  // namespace

std::string_view DiagnosticKindName(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::kMissingGlobal: return "MissingGlobal";
    case DiagnosticKind::kWordCountMismatch: return "WordCountMismatch";
    case DiagnosticKind::kWordIdentityMismatch: return "WordIdentityMismatch";
    case DiagnosticKind::kValueNotNumeric: return "ValueNotNumeric";
    case DiagnosticKind::kValueOutOfRange: return "ValueOutOfRange";
    case DiagnosticKind::kDuplicateWordIndex: return "DuplicateWordIndex";
    case DiagnosticKind::kUnparseableLine: return "UnparseableLine";
  }
  return "Unknown";
}

std::string ParseDiagnostic::ToString() const {
  return "line " + std::to_string(line) + ": " +
         std::string(DiagnosticKindName(kind)) + ": " + detail;
}

ParseOutcome ParseResponse(std::string_view text,
                           const std::vector<Word>& expected_words) {
  if (expected_words.empty()) {
    throw Error(ErrorCode::kInvalidInput, "target text has no words");
  }
  return Parser(text, expected_words).Run();
}

std::string SerializeSuggestion(const LlmScaleSuggestion& suggestion,
                                const std::vector<Word>& surface_words) {
  using internal::FormatShortest;
  if (surface_words.empty()) {
    throw Error(ErrorCode::kAlignmentMismatch, "suggestion needs at least one word");
  }
  if (suggestion.words.size() != surface_words.size()) {
    throw Error(ErrorCode::kAlignmentMismatch,
                "suggestion has " + std::to_string(suggestion.words.size()) +
                    " words, text has " + std::to_string(surface_words.size()));
  }
  std::string out = "REASONING:";
  const auto reasoning = internal::SplitLines(suggestion.reasoning);
  for (std::size_t i = 0; i < reasoning.size(); ++i) {
    out += i == 0 ? " " : "";
    out += reasoning[i];
    out += '\n';
  }
  if (reasoning.empty()) out += '\n';
  out += "GLOBAL: duration=" + FormatShortest(suggestion.global_duration) +
         " pitch=" + FormatShortest(suggestion.global_pitch) +
         " energy=" + FormatShortest(suggestion.global_energy) + '\n';
  for (std::size_t j = 0; j < surface_words.size(); ++j) {
    const WordSuggestion& w = suggestion.words[j];
    if (w.index != j || WordKey(w.key) != surface_words[j].key) {
      throw Error(ErrorCode::kAlignmentMismatch,
                  "word " + std::to_string(j) + " does not match '" +
                      surface_words[j].surface + "'");
    }
    out += "WORD " + std::to_string(j) + ' ' + surface_words[j].surface +
           ": duration=" + FormatShortest(w.duration) +
           " pitch=" + FormatShortest(w.pitch) +
           " energy=" + FormatShortest(w.energy) + '\n';
  }
  return out;
}

}  // namespace prosody
