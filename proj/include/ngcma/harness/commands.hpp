#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ngcma::harness {

enum ExitCode : int { kExitOk = 0, kExitNumeric = 1, kExitConfig = 2 };

/// Entry point of the `ngcma` command line; `args` excludes the program name.
/// Subcommands: optimize, validate <suite>, plotdata [qgrid|runcurve]; each
/// takes --config, --seed and --out.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ngcma::harness
