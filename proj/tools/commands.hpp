#pragma once

#include <ostream>

namespace sfib::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kNumerical = 3,
    kResource = 4,
};

/// Parses argv and runs one subcommand. Data goes to --out or `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sfib::cli
