#pragma once

#include <ostream>

namespace hetsize {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int not_controllable = 2;
inline constexpr int assumption_violated = 3;
inline constexpr int usage = 64;
inline constexpr int data = 65;
inline constexpr int internal = 70;
}  // namespace exit_code

/// Entry point of the hetsize command line tool. Writes the JSON report (or
/// the --pretty summary) to out and diagnostics to err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hetsize
