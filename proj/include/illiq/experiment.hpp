#pragma once

#include "illiq/config.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

// Batch orchestration: diagnostics, optimization, CSV emission and the run
// manifest. All outputs are written temp-then-rename; a failed run leaves no
// partial files behind. Result CSVs contain no timestamps, so reruns with the
// same config and seed are byte-identical; wall-clock lives in the manifest.

namespace illiq {

struct ManifestEntry {
    std::string file;
    std::uint64_t checksum = 0;  // fnv1a64 of the file bytes
    std::uint64_t bytes = 0;
};

struct RunManifest {
    std::string version;
    std::uint64_t config_hash = 0;
    std::uint64_t base_seed = 0;
    std::string started_utc;
    std::string finished_utc;
    double wall_seconds = 0.0;
    std::vector<ManifestEntry> files;
};

enum class RunMode { check_only, optimize, compare_randomized };

// Parses and validates the config, runs wellposedness_check and
// integrability_diagnostic, then the requested optimization, and writes
// diagnostics.csv, trace.csv, summary.csv, best_strategy.ini, optional
// outcomes.csv / compare.csv, and manifest.txt under out_dir.
RunManifest run_experiment(const ExperimentConfig& config, RunMode mode);

// Derives plot-ready series from an existing run directory:
//   plot_trace.csv    (generation, best_value, moment_diagnostic)
//   plot_survival.csv (x, empirical survival, distorted survival)
// Missing inputs are reported per file.
void emit_plot_data(const std::string& run_dir, const ExperimentConfig& config);

RunManifest read_manifest(const std::string& path);
std::uint64_t file_checksum(const std::string& path);

} // namespace illiq
