#pragma once

#include <string>
#include <vector>

namespace fpr::cli {

/// Entry point behind the `fpr` binary. Returns the process exit code:
/// 0 on success, 2 for usage/constraint/input errors (reported as one
/// machine-readable JSON line on stderr), 1 for internal failures.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace fpr::cli
