#pragma once

#include <ostream>

namespace wisdomdyn {

enum ExitCode : int { kExitSuccess = 0, kExitVerificationFailed = 1, kExitUsage = 2 };

/// Entry point of the `wisdomdyn` tool:
///   wisdomdyn <centrality|simulate|learn|montecarlo|verify|paper>
///             --config <file> [--out <dir>] [--seed <u64>]
/// Returns 0 on success, 1 when a verification or computation fails and 2 for
/// usage or configuration errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wisdomdyn
