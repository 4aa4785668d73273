#pragma once

namespace gradsat {

// Full command-line driver (solve / emit / sat subcommands). Returns the
// process exit code: 0 sat, 1 unsat, 2 unknown, 64 usage or input error.
int run_cli(int argc, char** argv);

}  // namespace gradsat
