#pragma once

#include <iosfwd>

namespace quantest::cli {

/// Exit codes: 0 success, 2 usage or domain error, 3 numerical failure.
enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

/// Runs one subcommand. Files are the only real output; `out` gets a
/// single summary line and `err` any diagnostic.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace quantest::cli
