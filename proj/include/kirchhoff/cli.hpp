#pragma once

#include <string>
#include <vector>

namespace kirchhoff::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitCheckFailed = 4;

/// Full command-line entry point (subcommands: simulate, ground-state,
/// well-depth, classify, bounds, sweep). Returns the process exit code.
int run(const std::vector<std::string>& args);

int run(int argc, char** argv);

} // namespace kirchhoff::cli
