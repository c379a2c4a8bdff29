#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace putwrite::cli {

/// Subcommands: synth, backtest, grid, report. Returns the process exit
/// status; on failure a one-line JSON error record goes to `err`.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace putwrite::cli
