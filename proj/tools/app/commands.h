/*
 * Copyright 2026 The Povex Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POVEX_TOOLS_APP_COMMANDS_H_
#define POVEX_TOOLS_APP_COMMANDS_H_

#include <iosfwd>

#include "absl/status/status.h"

namespace povex::app {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitContrastiveSet = 3;
inline constexpr int kExitBudget = 4;

int ExitCodeFor(const absl::Status& status);

// `povex <generate|train|validate|explain|plotdata|serve> [flags]`.
int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace povex::app

#endif  // POVEX_TOOLS_APP_COMMANDS_H_
