#pragma once

#include <string>

#include "pipeline/config.hpp"

namespace pipeline {

/// Library-level entry points behind the CLI subcommands. Each returns a
/// process exit code and writes its outputs plus a manifest under
/// config.out_dir. Errors are reported on stderr.

/// Reconstruction + consistency report for the degree series.
int cmd_ingest(const RunConfig& config);

/// One trajectory/metrics CSV per configured scenario.
int cmd_simulate(const RunConfig& config);

/// OAT sweeps, PRCC, and the congestion heatmap.
int cmd_sensitivity(const RunConfig& config);

/// The (a_F, K_F) congestion heatmap alone.
int cmd_sweep(const RunConfig& config);

} // namespace pipeline
