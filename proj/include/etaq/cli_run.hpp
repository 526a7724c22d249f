#pragma once

#include <string>
#include <vector>

namespace etaq::cli {

/// Dispatches a command line and returns the process exit code:
///   0 success, 1 nonconvergence, 2 admissibility or positivity violation,
///   3 input error (bad flags, bad config, malformed expressions).
/// Subcommands: verify, solve, geometry, barrier, radial-solve, probe-kn.
/// Each reads a JSON config (--spec) and writes CSV artifacts (--out);
/// diagnostics go to standard error, one summary line to standard output.
int run(int argc, const char* const* argv);

/// Same dispatcher for in-process callers; args exclude the program name.
int run(const std::vector<std::string>& args);

}  // namespace etaq::cli
