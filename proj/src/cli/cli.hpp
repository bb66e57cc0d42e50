#pragma once

#include <string>
#include <vector>

namespace claws::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2, kIoError = 3 };

/// Entry point shared by the `claws` executable and the tests. `args` excludes
/// the program name.
int run(const std::vector<std::string>& args);

}  // namespace claws::cli
