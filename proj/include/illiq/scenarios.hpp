#pragma once

#include "illiq/cpt.hpp"
#include "illiq/frictions.hpp"
#include "illiq/market.hpp"
#include "illiq/portfolio.hpp"

#include <cstdint>
#include <vector>

// Frozen scenario sets for common-random-number optimization: each scenario
// carries one realized driving path, its price path and benchmark, the
// precomputed market bound, and one uniform randomization draw from a stream
// independent of the path seeds.

namespace illiq {

struct MarketConfig {
    ProcessSpec process;
    PriceMapSpec price_map;
    BenchmarkSpec benchmark;
};

struct Scenario {
    DrivingPath driving;
    PricePath price;
    double benchmark_w = 0.0;
    double u_draw = 0.0;
    double bound = 0.0;  // market_bound on this path
};

struct ScenarioSet {
    TimeGrid grid;
    std::uint64_t base_seed = 0;
    std::vector<Scenario> scenarios;

    std::size_t size() const { return scenarios.size(); }
};

// Path i uses seed base_seed + i; u_draw i comes from a separate stream.
// OpenMP over paths; output independent of thread count.
ScenarioSet build_scenarios(const MarketConfig& market, const FrictionSpec& friction,
                            const TimeGrid& grid, std::size_t n_paths,
                            std::uint64_t base_seed);

// Reference implementation used by tests and the benchmark; must produce
// bit-identical output to build_scenarios.
ScenarioSet build_scenarios_serial(const MarketConfig& market,
                                   const FrictionSpec& friction,
                                   const TimeGrid& grid, std::size_t n_paths,
                                   std::uint64_t base_seed);

// Simulates X1 on every scenario (with its own u_draw), forms the sample of
// X1 - W and returns cpt_value of it. Deterministic given inputs.
double evaluate_objective(const StrategyParams& params, const ScenarioSet& scenarios,
                          const FrictionSpec& friction, const CPTSpec& cpt);

// Same, also exposing the per-scenario outcome sample (X1 - W, ordered by
// scenario index) for bootstraps and reports.
double evaluate_objective_sample(const StrategyParams& params,
                                 const ScenarioSet& scenarios,
                                 const FrictionSpec& friction, const CPTSpec& cpt,
                                 std::vector<double>& sample_out);

// Objective for each candidate in one batch; OpenMP over candidates.
std::vector<double> evaluate_population(const std::vector<StrategyParams>& candidates,
                                        const ScenarioSet& scenarios,
                                        const FrictionSpec& friction,
                                        const CPTSpec& cpt);

// Serial twin of evaluate_population, kept for testing and benchmarking.
std::vector<double> evaluate_population_serial(const std::vector<StrategyParams>& candidates,
                                               const ScenarioSet& scenarios,
                                               const FrictionSpec& friction,
                                               const CPTSpec& cpt);

} // namespace illiq
