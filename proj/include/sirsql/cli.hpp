#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sirsql {

/// Exit codes of the command-line tool.
enum ExitCode : int { Ok = 0, RuntimeFailure = 1, SemanticFailure = 2, ParseFailure = 3 };

/// Runs the command line `args` (program name first) against the given
/// streams and returns the exit code. The kernel location falls back to
/// the SIRSQL_KERNEL environment variable.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace sirsql
