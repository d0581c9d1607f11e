#pragma once

#include <ostream>
#include <string_view>

namespace methane {

inline constexpr std::string_view kVersion = "1.0.0";

// Exit codes: 0 success, 1 data or numerical error, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `methane` tool; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace methane
