#pragma once

#include <ostream>

namespace nanoloc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point for the `nanoloc` tool. Subcommands: simulate, spectrum,
/// medium-info, compare.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nanoloc
