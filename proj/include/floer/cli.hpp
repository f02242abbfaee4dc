#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace floer::cli {

/// Exit codes: 0 success, 1 usage or IO error, 2 mathematical failure.
enum Exit { ok = 0, usage = 1, failure = 2 };

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics and timing to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace floer::cli
