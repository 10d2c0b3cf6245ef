#pragma once

#include "illiq/optimizer.hpp"

#include <cstdint>
#include <string>

// Plain-text section/key-value experiment configs. Parsing is strict: unknown
// sections or keys and violated cross-section constraints are reported with
// the offending field and constraint before any computation starts.

namespace illiq {

struct ExperimentConfig {
    ProblemSpec problem;
    OptimizerSettings optimizer;
    std::uint64_t base_seed = 1;
    std::string out_dir = "out";
    bool run_compare_randomized = false;
    bool dump_paths = false;

    void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical serialization; parse(serialize(c)) is field-identical to c.
std::string serialize_config(const ExperimentConfig& config);

// Optimized strategies round-trip through result files in the same format.
std::string serialize_strategy(const StrategyParams& params);
StrategyParams parse_strategy_text(const std::string& text, std::size_t n_steps);
StrategyParams parse_strategy_file(const std::string& path, std::size_t n_steps);

// FNV-1a 64 over the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& config);

std::uint64_t fnv1a64(const void* data, std::size_t n);

} // namespace illiq
