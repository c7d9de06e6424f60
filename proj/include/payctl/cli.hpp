#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace payctl {

// Exit codes of run_command.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitInfeasible = 3,
  kExitInconclusive = 4,
};

// Runs one payctl subcommand; args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace payctl
