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

// The response grammar taught to the LLM and its validating parser.
//
//   REASONING: <free text, one or more lines>
//   GLOBAL: duration=<v> pitch=<v> energy=<v>
//   WORD <index> <word>: duration=<v> pitch=<v> energy=<v>
//
// One WORD line per target word, 0-based indices in ascending order. Blank
// lines are ignored and whitespace inside a line is not significant.

#ifndef PROSODY_RESPONSE_H_
#define PROSODY_RESPONSE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prosody/features.h"
#include "prosody/mapping.h"

namespace prosody {

enum class DiagnosticKind {
  kMissingGlobal,
  kWordCountMismatch,
  kWordIdentityMismatch,
  kValueNotNumeric,
  kValueOutOfRange,
  kDuplicateWordIndex,
  kUnparseableLine,
};

std::string_view DiagnosticKindName(DiagnosticKind kind);

struct ParseDiagnostic {
  DiagnosticKind kind = DiagnosticKind::kUnparseableLine;
  // 1-based. One past the last line means "at the end of the response".
  std::size_t line = 0;
  std::string detail;
  // Only meaningful for kValueOutOfRange: the value was clamped and the
  // parse continued.
  bool clamped = false;

  // Everything except a clamped out-of-range value rejects the response.
  bool IsFatal() const { return kind != DiagnosticKind::kValueOutOfRange; }
  std::string ToString() const;

  bool operator==(const ParseDiagnostic&) const = default;
};

struct ParseOutcome {
  // Present iff no diagnostic is fatal.
  std::optional<LlmScaleSuggestion> suggestion;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return suggestion.has_value(); }
};

// Never throws on arbitrary text; every problem found is reported. Throws
// kInvalidInput only if expected_words is empty.
ParseOutcome ParseResponse(std::string_view text,
                           const std::vector<Word>& expected_words);

// Canonical grammar text. Throws kAlignmentMismatch if the suggestion does
// not have exactly one entry per word, in order, with matching keys, or if
// there are no words.
std::string SerializeSuggestion(const LlmScaleSuggestion& suggestion,
                                const std::vector<Word>& surface_words);

}  // namespace prosody

#endif  // PROSODY_RESPONSE_H_
