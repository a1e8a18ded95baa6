// Copyright 2026 The mcqa-probe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MCQA_PROBE_TOOLS_CLI_H_
#define MCQA_PROBE_TOOLS_CLI_H_

#include <iosfwd>
#include <span>
#include <string>

namespace mcqa_probe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsage = 2;

// Runs `mcqa_probe <subcommand> ...`. `args` excludes the program name.
// "-" as a file argument means `in` / `out`.
int Run(std::span<const std::string> args, std::istream& in,
        std::ostream& out, std::ostream& err);

}  // namespace mcqa_probe::cli

#endif  // MCQA_PROBE_TOOLS_CLI_H_
