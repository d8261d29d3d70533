#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vectormaton::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kFormat = 3,
  kResourceLimit = 4,
};

/// Runs the vectormaton command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vectormaton::cli
