#pragma once

#include "illiq/cpt.hpp"
#include "illiq/scenarios.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Cross-entropy-style population search over strategy parameters with common
// random numbers, liquidation projection of open-loop candidates, and a
// Cesaro-average stabilization candidate formed from the elites each
// generation.

namespace illiq {

struct ProblemSpec {
    MarketConfig market;
    FrictionSpec friction;
    CPTSpec cpt;
    StrategyParams strategy_template;  // kind, clamp, mixture structure, init
    std::size_t n_steps = 64;
    std::size_t n_paths = 1024;
    bool allow_ill_posed = false;

    void validate() const;
};

struct OptimizerSettings {
    std::size_t population = 64;
    double elite_fraction = 0.125;
    std::size_t max_generations = 200;
    double init_spread = 1.0;
    double spread_floor = 1e-6;
    double spread_smoothing = 0.3;  // weight kept on the previous spread
    std::size_t restarts = 1;
    bool optimize_weights = false;  // mixture weights as free parameters
    std::size_t bootstrap_resamples = 200;
};

struct GenerationRow {
    std::size_t generation = 0;
    double best_value = 0.0;      // running best, nondecreasing
    double gen_best_value = 0.0;
    double elite_mean_value = 0.0;
    double max_spread = 0.0;
    double moment_diagnostic = 0.0;  // rate-moment of the generation best
    double min_bound_slack = 0.0;    // min over paths of B - X1, generation best
};

struct OptimizationReport {
    StrategyParams best_params;
    double best_value = 0.0;
    double best_value_se = 0.0;      // bootstrap standard error
    double v_plus = 0.0;
    double v_minus = 0.0;
    std::vector<GenerationRow> trace;  // winning restart
    std::vector<double> final_sample;  // X1 - W at best_params, by scenario
    std::vector<double> final_bounds;  // B per scenario
    std::vector<double> final_x1;      // X1 per scenario
    std::vector<double> final_terminal_inventory;
    double bound_slack_quantiles[5] = {0, 0, 0, 0, 0};  // 0/25/50/75/100%
    double wall_seconds = 0.0;
    std::uint64_t base_seed = 0;
    std::size_t n_evaluations = 0;
    std::string termination;  // "budget", "spread_collapse", "no_feasible_evaluation"
};

struct ComparisonReport {
    OptimizationReport randomized;
    OptimizationReport deterministic;
    double gap = 0.0;        // randomized - deterministic
    double pooled_se = 0.0;  // sqrt(se_r^2 + se_d^2)
};

// Runs the population search. Throws if the well-posedness certificate FAILs
// and problem.allow_ill_posed is not set. Identical (problem, settings, seed)
// reproduce identical reports.
OptimizationReport optimize(const ProblemSpec& problem, const OptimizerSettings& settings,
                            std::uint64_t base_seed);

// Runs optimize twice on identical scenarios: once with the configured
// randomized_mixture template, once restricted to a U-independent open-loop
// template of the same size and clamp.
ComparisonReport compare_randomized(const ProblemSpec& problem,
                                    const OptimizerSettings& settings,
                                    std::uint64_t base_seed);

// Bootstrap standard error of cpt_value over resamples of `sample`.
double bootstrap_cpt_se(const std::vector<double>& sample, const CPTSpec& spec,
                        std::size_t n_resamples, std::uint64_t seed);

} // namespace illiq
