#include "illiq/scenarios.hpp"

#include "illiq/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <stdexcept>

namespace illiq {

namespace {

Scenario make_scenario(const MarketConfig& market, const FrictionSpec& friction,
                       const TimeGrid& grid, std::uint64_t base_seed,
                       std::uint64_t u_stream_seed, std::size_t index) {
    DrivingPath driving = sample_driving_path(
        market.process, grid, base_seed + static_cast<std::uint64_t>(index));
    PricePath price = price_from_driving(driving, market.price_map);
    const double w = benchmark_from_driving(driving, market.price_map, market.benchmark);
    std::mt19937_64 ugen(u_stream_seed + static_cast<std::uint64_t>(index));
    const double u = rng::uniform01(ugen);
    const double bound = market_bound(price, friction);
    return Scenario{std::move(driving), std::move(price), w, u, bound};
}

} // namespace

ScenarioSet build_scenarios_serial(const MarketConfig& market,
                                   const FrictionSpec& friction,
                                   const TimeGrid& grid, std::size_t n_paths,
                                   std::uint64_t base_seed) {
    if (n_paths == 0) throw std::invalid_argument("build_scenarios: n_paths == 0");
    const std::uint64_t u_seed = rng::stream_seed(base_seed, rng::kUniformStreamTag);
    ScenarioSet set{grid, base_seed, std::vector<Scenario>(n_paths, Scenario{
                                         DrivingPath{grid, 1, {}}, PricePath{grid, {}}, 0, 0, 0})};
    for (std::size_t i = 0; i < n_paths; ++i)
        set.scenarios[i] = make_scenario(market, friction, grid, base_seed, u_seed, i);
    return set;
}

ScenarioSet build_scenarios(const MarketConfig& market, const FrictionSpec& friction,
                            const TimeGrid& grid, std::size_t n_paths,
                            std::uint64_t base_seed) {
    if (n_paths == 0) throw std::invalid_argument("build_scenarios: n_paths == 0");
    const std::uint64_t u_seed = rng::stream_seed(base_seed, rng::kUniformStreamTag);
    ScenarioSet set{grid, base_seed, std::vector<Scenario>(n_paths, Scenario{
                                         DrivingPath{grid, 1, {}}, PricePath{grid, {}}, 0, 0, 0})};
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n_paths); ++i)
        set.scenarios[static_cast<std::size_t>(i)] = make_scenario(
            market, friction, grid, base_seed, u_seed, static_cast<std::size_t>(i));
    return set;
}

double evaluate_objective_sample(const StrategyParams& params,
                                 const ScenarioSet& scenarios,
                                 const FrictionSpec& friction, const CPTSpec& cpt,
                                 std::vector<double>& sample_out) {
    const std::size_t n = scenarios.size();
    sample_out.resize(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n >= 1024 && !omp_in_parallel())
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const auto& sc = scenarios.scenarios[static_cast<std::size_t>(i)];
        const double x1 = simulate_terminal_money(params, sc.price, friction, sc.u_draw);
        sample_out[static_cast<std::size_t>(i)] = x1 - sc.benchmark_w;
    }
    return cpt_value(sample_out, cpt).value;
}

double evaluate_objective(const StrategyParams& params, const ScenarioSet& scenarios,
                          const FrictionSpec& friction, const CPTSpec& cpt) {
    std::vector<double> sample;
    return evaluate_objective_sample(params, scenarios, friction, cpt, sample);
}

std::vector<double> evaluate_population_serial(const std::vector<StrategyParams>& candidates,
                                               const ScenarioSet& scenarios,
                                               const FrictionSpec& friction,
                                               const CPTSpec& cpt) {
    std::vector<double> values(candidates.size());
    std::vector<double> sample;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        sample.resize(scenarios.size());
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            const auto& sc = scenarios.scenarios[i];
            sample[i] = simulate_terminal_money(candidates[c], sc.price, friction,
                                                sc.u_draw) -
                        sc.benchmark_w;
        }
        values[c] = cpt_value(sample, cpt).value;
    }
    return values;
}

std::vector<double> evaluate_population(const std::vector<StrategyParams>& candidates,
                                        const ScenarioSet& scenarios,
                                        const FrictionSpec& friction,
                                        const CPTSpec& cpt) {
    std::vector<double> values(candidates.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (long long c = 0; c < static_cast<long long>(candidates.size()); ++c) {
        std::vector<double> sample(scenarios.size());
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            const auto& sc = scenarios.scenarios[i];
            sample[i] = simulate_terminal_money(candidates[static_cast<std::size_t>(c)],
                                                sc.price, friction, sc.u_draw) -
                        sc.benchmark_w;
        }
        values[static_cast<std::size_t>(c)] = cpt_value(sample, cpt).value;
    }
    return values;
}

} // namespace illiq
