#pragma once
#include <iosfwd>

namespace vrsg::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_divergence = 2;

// Entry point of the `vrsg` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace vrsg::cli
