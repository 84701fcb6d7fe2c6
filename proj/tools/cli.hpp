#pragma once

#include <iosfwd>

namespace bomp::cli {

/// Entry point shared by the `bomp` executable and the CLI tests.
/// Exit codes: 0 success, 1 usage or input error, 2 solver error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bomp::cli
