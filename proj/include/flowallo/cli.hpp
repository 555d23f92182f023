#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flowallo {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,      // unreadable or invalid input, bad configuration
  kExitNumerical = 2,  // singular network, degenerate fit and similar
};

/// Entry point behind the `flowallo` executable. Documents go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flowallo
