#pragma once

// The `shintani` command line: field | cone | invariant | converge |
// recognize | challenge.

#include <iosfwd>
#include <string>
#include <vector>

#include "shintani/error.hpp"

namespace shintani::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// 2 for input problems (parse, configuration, invalid field or conductor),
/// 3 for numeric budget and convergence failures.
int exit_code(ErrorKind kind);

/// Parses "7" or "2..10" into an ascending index list. Errors: Parse.
std::vector<std::uint64_t> parse_index_range(const std::string& text);

/// Runs the tool with argv-style arguments (args[0] is the program name).
/// Results go to `out` (or --out FILE), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shintani::cli
