#pragma once

#include <iosfwd>

namespace flownet {

// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitNonConvergence = 2,
    kExitInvariantViolation = 3,
};

// Subcommands: simulate, equilibrium, verify, compare-oracle, plot-data.
// Log verbosity comes from FLOWNET_LOG (trace, debug, info, warn, error, off).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flownet
