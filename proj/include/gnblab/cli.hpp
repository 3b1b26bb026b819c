#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gnblab::cli {

// Process exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;      // bad flags, bad config, invalid parameters
inline constexpr int exit_data = 2;       // unreadable or degenerate input data
inline constexpr int exit_numerical = 3;  // quadrature/optimizer failure, failed suite

/// Runs `gnblab <command> ...`; args excludes the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gnblab::cli
