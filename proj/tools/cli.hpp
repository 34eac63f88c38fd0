#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sinbad::cli {

/// Exit codes of the `sinbad` tool.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kDataError = 3;

/// Runs the tool on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sinbad::cli
