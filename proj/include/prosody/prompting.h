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

// Builds the natural-language prompt that asks an LLM for prosody values:
// task description, scale explanations, rules, worked examples with their
// reasoning, the response format, and finally the target text with its words
// enumerated one per line.

#ifndef PROSODY_PROMPTING_H_
#define PROSODY_PROMPTING_H_

#include <string>
#include <string_view>
#include <vector>

#include "prosody/mapping.h"

namespace prosody {

enum class PromptModeKind { kNeutral, kStyle, kDialogue };

struct PromptMode {
  PromptModeKind kind = PromptModeKind::kNeutral;
  // Speaking style or previous dialogue line; empty for neutral.
  std::string context;

  static PromptMode Neutral() { return {}; }
  static PromptMode Style(std::string style) {
    return {PromptModeKind::kStyle, std::move(style)};
  }
  static PromptMode Dialogue(std::string previous_line) {
    return {PromptModeKind::kDialogue, std::move(previous_line)};
  }

  bool operator==(const PromptMode&) const = default;
};

std::string_view PromptModeName(PromptModeKind kind);

// A worked example. The chain-of-thought lives in suggestion.reasoning.
struct Exemplar {
  PromptMode mode;
  std::string target_text;
  LlmScaleSuggestion suggestion;

  bool operator==(const Exemplar&) const = default;
};

struct PromptSpec {
  PromptMode mode;
  std::string target_text;
  std::vector<Exemplar> exemplars;
  std::vector<std::string> rules;
  std::string format_instructions;
  std::string scale_explanations;
};

// The ten shipped exemplars (three neutral, four style, three dialogue).
const std::vector<Exemplar>& DefaultExemplars();
std::vector<std::string> DefaultRules();
std::string DefaultFormatInstructions();
std::string DefaultScaleExplanations();

// A spec filled with the shipped defaults.
PromptSpec DefaultPromptSpec(PromptMode mode, std::string target_text);

// Exemplar asset: records separated by a line '---'. Each record is an
// optional 'CONTEXT: style: <text>' or 'CONTEXT: dialogue: <text>' line, a
// 'TEXT: <target>' line, then a response in the response grammar.
// Throws kInvalidSpec with the record's line number on any problem.
std::vector<Exemplar> ParseExemplars(std::string_view document);
std::string SerializeExemplars(const std::vector<Exemplar>& exemplars);
std::vector<Exemplar> ReadExemplarFile(const std::string& path);

// Throws kInvalidSpec.
void ValidatePromptSpec(const PromptSpec& spec);

// Deterministic; a pure function of the spec.
std::string BuildPrompt(const PromptSpec& spec);

// Marker line that opens the enumerated word list of the target text. The
// last occurrence in a prompt belongs to the target.
inline constexpr std::string_view kWordListHeader = "Words:";

}  // namespace prosody

#endif  // PROSODY_PROMPTING_H_
