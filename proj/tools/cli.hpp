#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roomtune::cli {

enum ExitCode : int {
    kOk = 0,
    kValidation = 1,
    kIo = 2,
};

/// Parses `args` (without the program name) and runs one subcommand.
/// Reports go to `out`, warnings and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace roomtune::cli
