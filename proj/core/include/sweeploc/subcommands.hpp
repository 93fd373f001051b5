// SPDX-License-Identifier: Apache-2.0
//
// Subcommand dispatch shared by the CLI and the integration tests.

#ifndef SWEEPLOC_SUBCOMMANDS_HPP
#define SWEEPLOC_SUBCOMMANDS_HPP

#include <string>
#include <vector>

#include "sweeploc/sim_config.hpp"

namespace sweeploc {

/// Exit codes reported by run_subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitConfig = 2,
    kExitIo = 3,
    kExitCalibration = 4,
};

/// Names accepted by run_subcommand: rss-map, crlb-map, nlse-map, sweep-n,
/// cdf, calibrate.
const std::vector<std::string>& subcommand_names();

/// Run one subcommand against `cfg`, writing its CSV to `out_path`.
/// Diagnostics go to stderr; returns an ExitCode. `workers` = 0 means all
/// available cores.
int run_subcommand(const std::string& name, const SimulationConfig& cfg,
                   const std::string& out_path, int workers = 0);

} // namespace sweeploc

#endif // SWEEPLOC_SUBCOMMANDS_HPP
