#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evpq::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kIo = 2,
  kInvariant = 3,
};

/// Default output directory when --out-dir is not given.
inline constexpr const char* kOutputDirEnv = "EVPQ_OUTPUT_DIR";

/// Runs one command line (args[0] is the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evpq::cli
