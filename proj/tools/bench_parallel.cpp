// Times the OpenMP kernels against their serial reference implementations and
// checks that both produce bit-identical results.

#include "illiq/optimizer.hpp"
#include "illiq/rng.hpp"
#include "illiq/scenarios.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

using namespace illiq;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

MarketConfig gbm_market() {
    MarketConfig m;
    m.process.kind = ProcessKind::brownian_drift;
    m.process.drift = {0.05};
    m.process.volatility = {0.3};
    m.price_map.kind = PriceMapKind::exponential_of_first_coordinate;
    m.benchmark.kind = BenchmarkKind::zero;
    return m;
}

bool scenario_sets_equal(const ScenarioSet& a, const ScenarioSet& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.scenarios[i].price.s != b.scenarios[i].price.s) return false;
        if (a.scenarios[i].u_draw != b.scenarios[i].u_draw) return false;
        if (a.scenarios[i].bound != b.scenarios[i].bound) return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    std::size_t n_paths = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 8192;
    std::size_t n_steps = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 64;
    std::size_t population = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 64;

#ifdef _OPENMP
    std::printf("OpenMP: %d thread(s)\n", omp_get_max_threads());
#else
    std::printf("OpenMP: not available (serial build)\n");
#endif
    std::printf("workload: %zu paths x %zu steps, population %zu\n\n", n_paths, n_steps,
                population);

    const TimeGrid grid(n_steps);
    const auto market = gbm_market();
    const auto friction = FrictionSpec::make(2.0, HKind::constant, 0.5);

    double t0 = now_seconds();
    const auto scen_serial = build_scenarios_serial(market, friction, grid, n_paths, 7);
    const double t_scen_serial = now_seconds() - t0;

    t0 = now_seconds();
    const auto scen_parallel = build_scenarios(market, friction, grid, n_paths, 7);
    const double t_scen_parallel = now_seconds() - t0;

    if (!scenario_sets_equal(scen_serial, scen_parallel)) {
        std::printf("FAIL: scenario sets differ between serial and parallel builds\n");
        return 1;
    }

    CPTSpec cpt;
    cpt.u_plus = {UtilitySide::plus, UtilityForm::power, 1.0, 0.88};
    cpt.u_minus = {UtilitySide::minus, UtilityForm::power, 1.0, 0.88};
    cpt.w_plus = {DistortionForm::inverse_s, 0.61};
    cpt.w_minus = {DistortionForm::inverse_s, 0.69};
    cpt.delta1 = 0.88;
    cpt.c3 = 0.5;
    cpt.delta2 = 0.69;

    std::mt19937_64 gen(42);
    std::vector<StrategyParams> candidates(population);
    for (auto& c : candidates) {
        c.kind = StrategyKind::open_loop;
        c.open_loop_rates.resize(n_steps);
        for (auto& r : c.open_loop_rates) r = 2.0 * rng::uniform01(gen) - 1.0;
        c.open_loop_rates = enforce_liquidation(c.open_loop_rates, grid);
    }

    t0 = now_seconds();
    const auto v_serial = evaluate_population_serial(candidates, scen_parallel, friction, cpt);
    const double t_pop_serial = now_seconds() - t0;

    t0 = now_seconds();
    const auto v_parallel = evaluate_population(candidates, scen_parallel, friction, cpt);
    const double t_pop_parallel = now_seconds() - t0;

    if (v_serial != v_parallel) {
        std::printf("FAIL: population values differ between serial and parallel paths\n");
        return 1;
    }

    std::printf("%-24s %10s %10s %8s\n", "kernel", "serial[s]", "openmp[s]", "speedup");
    std::printf("%-24s %10.4f %10.4f %8.2fx\n", "build_scenarios", t_scen_serial,
                t_scen_parallel, t_scen_serial / t_scen_parallel);
    std::printf("%-24s %10.4f %10.4f %8.2fx\n", "evaluate_population", t_pop_serial,
                t_pop_parallel, t_pop_serial / t_pop_parallel);
    std::printf("\nresults identical across implementations\n");
    return 0;
}
