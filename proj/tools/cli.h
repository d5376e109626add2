// Copyright 2026 The SBFL Engine Authors.
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

// Command-line front end:
//
//   sbfl rank    (--spectrum F | --coverage MANIFEST --tests JUNIT) [options]
//   sbfl explain (--spectrum F | --coverage MANIFEST --tests JUNIT) --element NAME
//   sbfl serve   [--data-dir DIR] [--port N]
//   sbfl elo     --pool FILE (init --items FILE [--seed N] | vote | standings)
//
// Exit status: 0 success, 2 usage or input error, 1 anything else.

#ifndef SBFL_TOOLS_CLI_H_
#define SBFL_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace sbfl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err);

}  // namespace sbfl

#endif  // SBFL_TOOLS_CLI_H_
