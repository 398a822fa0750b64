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

#include "prosody/llm.h"

#include <cctype>
#include <random>

#include "json.hpp"
#include "prosody/features.h"
#include "text_util.h"

namespace prosody {
namespace {

std::uint64_t Fnv1a(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

// Target words as listed after the last word-list header.
std::vector<Word> ExtractWordList(std::string_view prompt) {
  const auto lines = internal::SplitLines(prompt);
  std::size_t header = lines.size();
  for (std::size_t n = lines.size(); n-- > 0;) {
    if (internal::Trim(lines[n]) == kWordListHeader) {
      header = n;
      break;
    }
  }
  std::vector<Word> words;
  if (header == lines.size()) return words;
  for (std::size_t n = header + 1; n < lines.size(); ++n) {
    const std::string_view line = internal::Trim(lines[n]);
    const std::size_t space = line.find(' ');
    if (space == std::string_view::npos) break;
    const auto index = internal::ParseInt(line.substr(0, space));
    if (!index || *index != static_cast<long long>(words.size())) break;
    const std::string_view surface = internal::Trim(line.substr(space + 1));
    if (surface.empty() || surface.find(' ') != std::string_view::npos) break;
    words.push_back(Word{std::string(surface), WordKey(surface)});
  }
  return words;
}

std::string ReplaceAll(std::string text, std::string_view from,
                       std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

}  // namespace

void ValidateBackendConfig(const BackendConfig& config) {
  if (config.max_retries < 0) {
    throw Error(ErrorCode::kInvalidInput, "max_retries must be >= 0");
  }
  if (!(config.timeout_s > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "timeout must be > 0");
  }
  if (config.max_parallel < 1) {
    throw Error(ErrorCode::kInvalidInput, "max_parallel must be >= 1");
  }
  if (!(config.temperature >= 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "temperature must be >= 0");
  }
  if (!(config.backoff_base_s >= 0.0) || !(config.backoff_max_s >= 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "backoff delays must be >= 0");
  }
}

std::string MockComplete(std::string_view prompt, std::uint64_t seed) {
  const std::vector<Word> words = ExtractWordList(prompt);
  if (words.empty()) {
    throw Error(ErrorCode::kUnrecognizedPrompt,
                "prompt has no enumerated word list");
  }
  // mt19937_64 output is fixed by the standard; distributions are not, so
  // values are derived from raw draws.
  std::mt19937_64 rng(Fnv1a(prompt) ^ (seed * 0x9e3779b97f4a7c15ull));
  const auto global_value = [&]() {
    return static_cast<double>(static_cast<int>(rng() % 11) - 5);
  };
  const auto local_value = [&]() {
    return rng() % 3 == 0 ? static_cast<double>(1 + rng() % 5) : 0.0;
  };
  LlmScaleSuggestion suggestion;
  suggestion.reasoning = "Mock suggestion (seed " + std::to_string(seed) +
                         ") for " + std::to_string(words.size()) + " words.";
  suggestion.global_duration = global_value();
  suggestion.global_pitch = global_value();
  suggestion.global_energy = global_value();
  for (std::size_t j = 0; j < words.size(); ++j) {
    WordSuggestion w{j, words[j].key, 0.0, 0.0, 0.0};
    w.duration = local_value();
    w.pitch = local_value();
    w.energy = local_value();
    suggestion.words.push_back(std::move(w));
  }
  return SerializeSuggestion(suggestion, words);
}

std::string DefaultRepairTemplate() {
  return "\nYour previous answer could not be used:\n"
         "{diagnostics}\n"
         "Answer again. Follow the response format exactly and give one WORD "
         "line for every word in the word list above, in order, without "
         "skipping or adding words.\n";
}

RepairExhaustedError::RepairExhaustedError(Transcript transcript)
    : Error(ErrorCode::kRepairExhausted,
            [&] {
              std::string message =
                  "no usable response after " +
                  std::to_string(transcript.attempts.size()) + " attempt(s)";
              for (std::size_t i = 0; i < transcript.attempts.size(); ++i) {
                for (const ParseDiagnostic& d : transcript.attempts[i].diagnostics) {
                  if (!d.IsFatal()) continue;
                  message += "\n  attempt " + std::to_string(i + 1) + ": " +
                             d.ToString();
                }
              }
              return message;
            }()),
      transcript_(std::move(transcript)) {}

std::string RenderRepairPrompt(const std::string& original_prompt,
                               const RepairPolicy& policy,
                               const Attempt& failed) {
  std::string diagnostics;
  for (const ParseDiagnostic& d : failed.diagnostics) {
    if (!diagnostics.empty()) diagnostics += '\n';
    diagnostics += "- " + d.ToString();
  }
  std::string repair = ReplaceAll(policy.repair_instruction_template,
                                  "{diagnostics}", diagnostics);
  repair = ReplaceAll(std::move(repair), "{response}", failed.response);
  return original_prompt + repair;
}

SuggestResult SuggestWithRepair(const PromptSpec& spec,
                                CompletionBackend& backend,
                                const RepairPolicy& policy) {
  if (policy.max_attempts < 1) {
    throw Error(ErrorCode::kInvalidInput, "max_attempts must be >= 1");
  }
  const std::string original = BuildPrompt(spec);
  const std::vector<Word> words = TokenizeWords(spec.target_text);

  Transcript transcript;
  std::string prompt = original;
  for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
    std::string response = backend.Complete(prompt);
    ParseOutcome outcome = ParseResponse(response, words);
    transcript.attempts.push_back(
        Attempt{prompt, std::move(response), std::move(outcome.diagnostics)});
    if (outcome.ok()) {
      return SuggestResult{std::move(*outcome.suggestion), std::move(transcript)};
    }
    prompt = RenderRepairPrompt(original, policy, transcript.attempts.back());
  }
  throw RepairExhaustedError(std::move(transcript));
}

namespace {

nlohmann::ordered_json AttemptsJson(const Transcript& transcript) {
  nlohmann::ordered_json attempts = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < transcript.attempts.size(); ++i) {
    const Attempt& a = transcript.attempts[i];
    nlohmann::ordered_json diagnostics = nlohmann::ordered_json::array();
    for (const ParseDiagnostic& d : a.diagnostics) {
      diagnostics.push_back({{"kind", DiagnosticKindName(d.kind)},
                             {"line", d.line},
                             {"fatal", d.IsFatal()},
                             {"detail", d.detail}});
    }
    attempts.push_back({{"attempt", i + 1},
                        {"prompt", a.prompt},
                        {"response", a.response},
                        {"diagnostics", std::move(diagnostics)}});
  }
  return attempts;
}

}  // namespace

std::string TranscriptToJson(const Transcript& transcript, int indent) {
  nlohmann::ordered_json doc = {{"attempts", AttemptsJson(transcript)}};
  return doc.dump(indent);
}

std::string TranscriptsToJson(
    const std::vector<std::pair<std::string, Transcript>>& transcripts,
    int indent) {
  nlohmann::ordered_json utterances = nlohmann::ordered_json::array();
  for (const auto& [id, transcript] : transcripts) {
    utterances.push_back({{"id", id}, {"attempts", AttemptsJson(transcript)}});
  }
  nlohmann::ordered_json doc = {{"utterances", std::move(utterances)}};
  return doc.dump(indent);
}

}  // namespace prosody
