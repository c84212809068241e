#pragma once

#include <string>
#include <vector>

namespace hsim::cli {

// Runs the command line front end and returns the process exit code:
// 0 success, 1 usage, 2 input/output, 3 numerical failure.
int run(int argc, const char* const* argv);

// Convenience overload; args excludes the program name.
int run(const std::vector<std::string>& args);

} // namespace hsim::cli
