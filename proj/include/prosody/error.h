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

#ifndef PROSODY_ERROR_H_
#define PROSODY_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace prosody {

enum class ErrorCode {
  kInvalidInput,
  kMalformedFile,
  kDegenerateStats,
  kNoVoicedPhones,
  kWordMismatch,
  kPlanShapeMismatch,
  kNonPositiveF0,
  kInvalidSpec,
  kUnrecognizedPrompt,
  kAlignmentMismatch,
  kAuth,
  kRateLimited,
  kNetwork,
  kMalformedApiResponse,
  kRepairExhausted,
  kInsufficientData,
  kNoPairs,
  kMixedSystemSets,
  kEmptyInput,
  kUnlabeledSet,
};

std::string_view ErrorCodeName(ErrorCode code);

// Base class for every error raised by the library. The message never
// contains secrets (API keys are only ever read, never echoed).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  // True for failures of the completion backend (transport, auth, quota).
  bool IsBackendError() const {
    return code_ == ErrorCode::kAuth || code_ == ErrorCode::kRateLimited ||
           code_ == ErrorCode::kNetwork ||
           code_ == ErrorCode::kMalformedApiResponse;
  }

 private:
  ErrorCode code_;
};

}  // namespace prosody

#endif  // PROSODY_ERROR_H_
