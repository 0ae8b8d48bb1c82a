#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lyubich::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
};

/// Runs one `lyubich-lab` command. Arguments exclude the program name.
/// Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Entry point used by the executable.
int main(int argc, char** argv);

}  // namespace lyubich::cli
