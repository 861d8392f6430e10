#pragma once

#include <string>
#include <vector>

namespace talenti::cli {

// Runs one CLI invocation (args exclude the program name) and returns the
// process exit code: 0 success, 2 validation or usage, 3 numerical failure,
// 4 violated internal contract. Never throws; output files are written
// atomically, so a failing invocation leaves no partial outputs.
int dispatch(const std::vector<std::string>& args);

}
