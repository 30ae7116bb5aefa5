#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fraudgraph::cli {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitGradcheck = 3;

/// Runs one subcommand (gen, train, eval, gradcheck, simulate). `args`
/// excludes the program name. Reports go to `out`; failures print a single
/// "error: <kind>: <reason>" line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fraudgraph::cli
