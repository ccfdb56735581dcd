// Copyright 2026 The nla-weaksim Authors
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

#ifndef NLA_CLI_COMMANDS_HPP
#define NLA_CLI_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace nla::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    /// Zero herald probability, infinite gain or a truncation violation.
    kExitNumerical = 3,
};

struct CommandOutput {
    std::string body;
    int exit_code = kExitOk;
};

/// Runs a resolved, validated configuration and renders it in its format.
CommandOutput execute(const RunConfig& config);

/// Parses `args` (without the program name), runs the command and writes the
/// result to the configured output or `out`. Diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nla::cli

#endif  // NLA_CLI_COMMANDS_HPP
