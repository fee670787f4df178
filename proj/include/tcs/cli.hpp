#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tcs {

inline constexpr int kExitFeasible = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;

/// Runs one tc-sizer invocation. `args` excludes the program name.
/// Reports go to `out`, diagnostics (one line) to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tcs
