#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// Command-line surface. Every subcommand prints one table, as CSV with
// '#'-prefixed parameter lines or as JSON {params, columns, rows}.
namespace starfv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Arguments exclude the program name. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses "lo:hi:step" (inclusive) or a comma-separated list; "inf" is
// accepted as a value. The result must be non-empty and sorted.
std::vector<double> parse_grid(const std::string& spec);

}  // namespace starfv::cli
