#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geomodel::cli {

enum ExitCode : int {
    kSuccess = 0,
    /// A violation or counterexample was found.
    kViolation = 1,
    kUsageError = 2,
    kResourceExceeded = 3,
};

/// Runs one command line (`args[0]` is the program name). Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geomodel::cli
