#pragma once

#include <iosfwd>

namespace rgnn {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_usage = 2,
  exit_budget = 3,
  exit_unstable_output = 4,
};

/// Entry point of `rgnn_lab`; writes results to `out` and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rgnn
