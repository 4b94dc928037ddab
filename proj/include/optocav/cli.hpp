#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "optocav/error.hpp"

namespace optocav::cli {

enum ExitCode : int {
    ok = 0,
    validation_error = 2,
    physics_error = 3,
    convergence_error = 4,
};

int exit_code(ErrorKind kind);

/// Parses `args` (without the program name), runs the subcommand and writes
/// the report to --out or to `out`. Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace optocav::cli
