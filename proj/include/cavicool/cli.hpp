#pragma once

#include <iosfwd>

namespace cavicool::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,
  kUsage = 2,
  kUnconverged = 3,
  kUnphysical = 4,
};

// Entry point of the cavicool tool. Subcommands: spectrum, rates, scan,
// oracle, table1.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cavicool::cli
