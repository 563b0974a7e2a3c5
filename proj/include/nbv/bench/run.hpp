#pragma once

#include <cstddef>
#include <string>

#include "nbv/bench/report.hpp"

namespace nbv {

// Worker pool width for dispatching seeds: the NBV_THREADS environment
// variable when set (clamped to >= 1), else the hardware concurrency.
std::size_t worker_count();

// Creates and returns a fresh run directory `base/<UTC stamp>-<protocol>`;
// a collision within the same second gets a numeric suffix. The returned
// directory exists.
std::string timestamped_run_dir(const std::string& base, Protocol protocol);

// Executes the configured experiment and writes its artifacts into run_dir
// (created if missing): report.json always; per-seed curve_seed<seed>.csv
// for the reconstruction protocols; theorem.csv and verdict.json for
// verify-theorem; plot.svg when config.svg; the requested debug dumps.
//
// Seeds are dispatched to the worker pool; a failing seed records its error
// in the report and the run continues (exit_code_for maps an all-failed run
// to a nonzero exit). Throws ConfigError on invalid configs, IoError when
// the mesh file or the run directory is unusable.
//
// Identical config + seeds reproduce every CSV byte for byte; wall time
// lives only in report.json.
RunReport run_experiment(const ExperimentConfig& config, const std::string& run_dir);

// Same, into a fresh timestamped directory under config.out.
RunReport run_experiment(const ExperimentConfig& config);

// Process exit status for a finished run: 0 when at least one seed
// succeeded, 1 when all failed.
int exit_code_for(const RunReport& report);

}  // namespace nbv
