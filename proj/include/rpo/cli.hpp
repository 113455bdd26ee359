// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rpo {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_config = 2,     // usage, configuration, parse and I/O errors
  exit_domain = 3,     // inputs outside the model's domain
  exit_numerical = 4,  // unrecoverable numerical failure
};

/// Runs the tool on `args` (without the program name). Failures print one
/// line `rpo-error kind=<kind> code=<exit code> message=<text>` to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            std::optional<std::string> env_seed = std::nullopt);

}  // namespace rpo
