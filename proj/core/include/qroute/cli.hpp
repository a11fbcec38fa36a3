#pragma once

namespace qroute {

/**
 * Command-line entry point with subcommands gen, find, bench, and scan.
 * Returns 0 on success, 2 on argument errors, 1 on runtime failures.
 */
int cli_entry(int argc, const char* const* argv);

}  // namespace qroute
