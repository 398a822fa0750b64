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

#include "prosody/error.h"

namespace prosody {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kMalformedFile: return "MalformedFile";
    case ErrorCode::kDegenerateStats: return "DegenerateStats";
    case ErrorCode::kNoVoicedPhones: return "NoVoicedPhones";
    case ErrorCode::kWordMismatch: return "WordMismatch";
    case ErrorCode::kPlanShapeMismatch: return "PlanShapeMismatch";
    case ErrorCode::kNonPositiveF0: return "NonPositiveF0";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kUnrecognizedPrompt: return "UnrecognizedPrompt";
    case ErrorCode::kAlignmentMismatch: return "AlignmentMismatch";
    case ErrorCode::kAuth: return "AuthError";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kNetwork: return "NetworkError";
    case ErrorCode::kMalformedApiResponse: return "MalformedApiResponse";
    case ErrorCode::kRepairExhausted: return "RepairExhausted";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kNoPairs: return "NoPairs";
    case ErrorCode::kMixedSystemSets: return "MixedSystemSets";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kUnlabeledSet: return "UnlabeledSet";
  }
  return "Unknown";
}

}  // namespace prosody
