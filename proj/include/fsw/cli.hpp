#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsw {

/// Exit statuses of the command-line tool.
enum ExitStatus : int { exit_ok = 0, exit_usage = 1, exit_config = 2, exit_runtime = 3 };

/// Runs `fswsim <subcommand> --config PATH [--out DIR] [--seed N] [--verbose]`.
/// args[0] is the program name. Reports go to `out`, errors to `err`.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace fsw
