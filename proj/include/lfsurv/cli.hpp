#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lfsurv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one command line (without the program name). Reports go to `out`
/// unless --output is given; diagnostics go to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lfsurv::cli
