#pragma once

#include <iosfwd>

namespace tachyon {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitUsage = 2, kExitCap = 3 };

/// Runs the `tachyon` command line.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tachyon
