#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ctrag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand (`args` excludes the program name). Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "3,5,10", "1..10" or mixtures like "1..3,5" into a sorted unique list.
/// Throws ConfigError on malformed input or a zero.
std::vector<std::size_t> parse_k_list(const std::string& text);

}  // namespace ctrag::cli
