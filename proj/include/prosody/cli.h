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

#ifndef PROSODY_CLI_H_
#define PROSODY_CLI_H_

#include <ostream>

namespace prosody {

// Exit codes of the prosody tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitRepairExhausted = 3;
inline constexpr int kExitBackendError = 4;

// Runs the command line 'prosody stats|prompt|plan|apply|eval ...'. Data
// goes to 'out', diagnostics to 'err'.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prosody

#endif  // PROSODY_CLI_H_
