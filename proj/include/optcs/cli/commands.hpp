#pragma once

#include <iosfwd>

#include "optcs/cli/config.hpp"

namespace optcs::cli {

// Both commands write results.csv and summary.json into config.out_dir
// (created if needed) and throw Error on invalid input.
int cmd_simulate(const RunConfig& config);
int cmd_select(const RunConfig& config);

// Parses flags, loads the config, applies overrides and runs the command.
// Returns the process exit code; messages go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& err);

}  // namespace optcs::cli
