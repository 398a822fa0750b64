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

// Completion backends and the suggest -> parse -> repair loop.

#ifndef PROSODY_LLM_H_
#define PROSODY_LLM_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prosody/error.h"
#include "prosody/mapping.h"
#include "prosody/prompting.h"
#include "prosody/response.h"

namespace prosody {

// Anything that can turn a prompt into completion text. Implementations
// must allow concurrent calls.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string Complete(const std::string& prompt) = 0;
};

inline constexpr std::string_view kDefaultApiKeyEnv = "OPENAI_API_KEY";

struct BackendConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-3.5-turbo-instruct";
  std::string api_key_env = std::string(kDefaultApiKeyEnv);
  double temperature = 0.0;
  double timeout_s = 60.0;
  int max_retries = 4;
  int max_parallel = 4;
  // Exponential backoff: base * 2^retry, capped, with jitter in [0.5, 1].
  double backoff_base_s = 1.0;
  double backoff_max_s = 30.0;
};

void ValidateBackendConfig(const BackendConfig& config);

// A backend failure after 'attempts' requests.
class BackendError : public Error {
 public:
  BackendError(ErrorCode code, const std::string& message, int attempts)
      : Error(code, message + " (after " + std::to_string(attempts) +
                        (attempts == 1 ? " attempt)" : " attempts)")),
        attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

// Chat-completions client: POST {base_url}/chat/completions with a bearer
// token read from the environment variable named in the config. Retries
// timeouts, connection failures, 408, 429 and 5xx responses.
class HttpBackend : public CompletionBackend {
 public:
  using SleepFn = std::function<void(std::chrono::duration<double>)>;

  explicit HttpBackend(BackendConfig config, SleepFn sleep = {});
  ~HttpBackend() override;

  std::string Complete(const std::string& prompt) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Deterministic stand-in for an LLM: finds the target word list in the
// prompt and answers with grammar-valid pseudo-random values. Throws
// kUnrecognizedPrompt if the prompt has no word list.
std::string MockComplete(std::string_view prompt, std::uint64_t seed);

class MockBackend : public CompletionBackend {
 public:
  explicit MockBackend(std::uint64_t seed) : seed_(seed) {}
  std::string Complete(const std::string& prompt) override {
    return MockComplete(prompt, seed_);
  }

 private:
  std::uint64_t seed_;
};

std::string DefaultRepairTemplate();

struct RepairPolicy {
  int max_attempts = 3;
  // '{diagnostics}' expands to one line per diagnostic, '{response}' to the
  // rejected response. The expansion is appended to the original prompt.
  std::string repair_instruction_template = DefaultRepairTemplate();
};

struct Attempt {
  std::string prompt;
  std::string response;
  std::vector<ParseDiagnostic> diagnostics;
};

struct Transcript {
  std::vector<Attempt> attempts;
};

struct SuggestResult {
  LlmScaleSuggestion suggestion;
  Transcript transcript;
};

class RepairExhaustedError : public Error {
 public:
  explicit RepairExhaustedError(Transcript transcript);
  const Transcript& transcript() const { return transcript_; }

 private:
  Transcript transcript_;
};

std::string RenderRepairPrompt(const std::string& original_prompt,
                               const RepairPolicy& policy,
                               const Attempt& failed);

// Builds the prompt, asks the backend, parses; on a rejected response asks
// again with the diagnostics appended, up to policy.max_attempts requests.
// Backend errors propagate unchanged.
SuggestResult SuggestWithRepair(const PromptSpec& spec,
                                CompletionBackend& backend,
                                const RepairPolicy& policy = {});

// JSON rendering of a transcript (stable key order).
std::string TranscriptToJson(const Transcript& transcript, int indent = 2);

// {"utterances": [{"id": ..., "attempts": [...]}, ...]}
std::string TranscriptsToJson(
    const std::vector<std::pair<std::string, Transcript>>& transcripts,
    int indent = 2);

}  // namespace prosody

#endif  // PROSODY_LLM_H_
