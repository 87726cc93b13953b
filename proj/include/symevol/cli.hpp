#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace symevol {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Shortest-safe text for a double: 17 significant digits, round-trip exact.
std::string format_double(double x);

/// Runs the command-line tool with argv-style arguments (args[0] is the
/// program name) and returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symevol
