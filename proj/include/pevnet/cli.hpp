#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pevnet {

enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitUsage = 2, kExitViolation = 3 };

/// Entry point of the `pevnet` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pevnet
