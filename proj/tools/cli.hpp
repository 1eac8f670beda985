#pragma once

#include <string>
#include <vector>

namespace qre::cli {

/// Entry point behind the qre binary, callable in-process for testing.
/// args excludes the program name. Returns the process exit code:
/// 0 success, 1 error, 2 infeasible without relaxation permission.
int run_cli(const std::vector<std::string>& args);

}  // namespace qre::cli
