#ifndef PSIM_EXPERIMENTS_HPP
#define PSIM_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "psim/metrics.hpp"

namespace psim {

struct RunOptions {
    int workers = 1;
    long long seed = -1; // recorded in output metadata when >= 0
};

/// Pointer-branch time series + exact-evolution amplitudes.
/// Writes timeseries.csv and summary.json.
void cmd_run(const Scenario& s, const RunOptions& opt, const std::string& out_dir);

/// Per-branch action data across the resolved theta grid.
/// Writes branches.csv and summary.json.
void cmd_branches(const Scenario& s, const RunOptions& opt, const std::string& out_dir);

/// Stationary-phase state vs direct theta quadrature along the grid.
/// Writes saddle_vs_quadrature.csv and summary.json.
void cmd_saddle_compare(const Scenario& s, const RunOptions& opt, const std::string& out_dir);

/// Window-averaged branch overlaps against the closed-form sinc law.
/// Writes overlap.csv and summary.json.
void cmd_orthogonality(const Scenario& s, const RunOptions& opt, const std::string& out_dir);

/// Decoherence factor, its running average, coherence magnitude, taus.
/// Writes decoherence.csv and summary.json.
void cmd_decoherence(const Scenario& s, const RunOptions& opt, const std::string& out_dir);

/// Non-demolition report only. Writes summary.json.
void cmd_validate(const Scenario& s, const RunOptions& opt, const std::string& out_dir);

struct SweepOutcome {
    int rows_ok = 0;
    int rows_failed = 0;
};

/// Cartesian parameter grid over the base document. Grid specs look like
/// "interaction.coupling=0.5,1,2"; rows run independently (optionally on
/// a worker pool) and merge in grid order. Writes sweep.csv and
/// summary.json. Raises sweep_failed when every row fails.
SweepOutcome cmd_sweep(const std::string& base_document,
                       const std::vector<std::string>& grid_specs, const RunOptions& opt,
                       const std::string& out_dir);

} // namespace psim

#endif
