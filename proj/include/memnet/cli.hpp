#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace memnet {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;      // memorization/audit/oracle mismatch
inline constexpr int kExitInput = 2;        // dataset, schema or usage error
inline constexpr int kExitProjection = 3;   // ProjectionSearchExhausted

// Runs `memnet <args...>` (args excludes the program name). JSON lines go to
// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace memnet
