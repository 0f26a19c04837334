#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace psdb::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kNumericalError = 3;

std::string version();

// Runs one command line (without the program name). Artifacts and reports go
// to `out` unless a path is given; diagnostics go to `err` as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psdb::cli
