#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sled::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUnexpected = 1;
inline constexpr int kValidationError = 2;
inline constexpr int kDataError = 3;

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sled::cli
