#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcmon::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kIoError = 3,
};

/// Entry point of the `pcmon` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcmon::cli
