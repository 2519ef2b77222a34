#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gsbm {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

/// Penalty flag value: `auto` (theoretical constant), a real, or `cX`
/// (X times the square root of the observed average degree).
struct LambdaSpec {
    enum class Kind { automatic, value, multiplier } kind = Kind::automatic;
    double x = 0.0;
};

/// Throws ConfigError for anything else.
LambdaSpec parse_lambda_spec(const std::string& s);

/// Runs one subcommand. args[0] is the program name. Regular output goes to
/// `out`, logs and diagnostics to `err`.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsbm
