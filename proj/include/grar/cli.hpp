#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace grar {

/// Command-line entry point. `args` excludes the program name. Returns the
/// process exit code; diagnostics go to `err`.
///
///     grar [--config FILE] [--jobs N] <command> [options]
///
/// Commands: synth, ingest, cluster, grid, train, eval, ablate, run. The
/// config file holds `key = value` lines (a `[command]` section or a
/// `command.key` prefix for command options); flags override it.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace grar
