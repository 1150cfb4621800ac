#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace zeeman::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kCheckFailed = 2 };

/// Parses `args` (without the program name), runs one subcommand and writes
/// its files. Human-readable progress goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zeeman::cli
