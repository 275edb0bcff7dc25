#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mis::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,             // integer-found / confirmed / clean
  kUnconfirmed = 2,    // fractional result, no witness, or exact search budget hit
  kInfeasible = 3,     // empty polytope or infeasible fit
  kViolations = 4,     // parameter verification found violated rows
  kNotConverged = 5,   // iteration limit, numerical failure
  kUsage = 64,         // bad flags or caller-side contract violation
  kDataError = 65,     // unreadable or malformed input files
  kInternal = 70,
};

/// Runs one command line (args[0] is the program name). Reports go to `out`,
/// diagnostics to `err`; the return value is an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mis::cli
