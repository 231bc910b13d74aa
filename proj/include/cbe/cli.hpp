#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbe::cli {

/// Exit codes: 0 success, 1 validation-suite failure, 2 bad input,
/// 3 numerical failure, 4 I/O failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "A:B:STEP" into an inclusive grid. Throws std::invalid_argument.
std::vector<double> parse_grid(const std::string& text);

} // namespace cbe::cli
