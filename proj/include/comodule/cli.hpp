#pragma once

#include <string>
#include <vector>

namespace comodule {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Runs the command-line front end. `args` excludes the program name.
/// Exit codes: 0 success, 2 usage error, 3 data error, 4 solver failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace comodule
