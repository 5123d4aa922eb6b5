#pragma once

#include <iosfwd>
#include <string>

namespace gradstorm::cli {

/// Entry point of the `gradstorm` tool. Exit codes: 0 success, 1 computation
/// failure, 2 configuration error, 3 validation failure. Errors are written
/// to `err` as one JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// printf("%.17g"); "nan", "inf", "-inf" for non-finite values.
std::string format_real(double v);

}  // namespace gradstorm::cli
