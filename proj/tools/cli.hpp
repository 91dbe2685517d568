#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aicard::cli {

enum ExitStatus : int { kOk = 0, kFailed = 1, kUsage = 2, kIoError = 3 };

/// Runs the `aicard` command line. `args` excludes the program name.
/// Reads files relative to the working directory and writes only to the
/// paths named by `--out`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace aicard::cli
