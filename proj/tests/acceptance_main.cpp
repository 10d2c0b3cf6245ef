// Acceptance suite: one check per criterion, each printing a PASS/FAIL line
// with its runtime. Exit code is the number of failed criteria.

#include "illiq/experiment.hpp"
#include "illiq/optimizer.hpp"
#include "illiq/rng.hpp"
#include "survival_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace illiq;
namespace fs = std::filesystem;

#ifndef PROJECT_SOURCE_DIR
#define PROJECT_SOURCE_DIR "."
#endif

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, double seconds,
            double limit_seconds, const std::string& note) {
    const bool in_budget = limit_seconds <= 0.0 || seconds < limit_seconds;
    const bool ok = pass && in_budget;
    if (!ok) ++g_failures;
    std::printf("%s criterion %d (%s) [%.1fs%s]%s%s\n", ok ? "PASS" : "FAIL", id,
                name.c_str(), seconds,
                limit_seconds > 0.0 ? (" / limit " + std::to_string(static_cast<int>(limit_seconds)) + "s").c_str()
                                    : "",
                note.empty() ? "" : ": ", note.c_str());
    if (pass && !in_budget)
        std::printf("     (checks passed but the runtime budget was exceeded)\n");
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

StrategyParams random_strategy(std::mt19937_64& gen, std::size_t n_steps, double bound) {
    const double pick = rng::uniform01(gen);
    StrategyParams s;
    s.rate_bound = bound;
    if (pick < 0.4) {
        s.kind = StrategyKind::open_loop;
        s.open_loop_rates.resize(n_steps);
        for (auto& r : s.open_loop_rates) r = bound * (2.0 * rng::uniform01(gen) - 1.0);
        return s;
    }
    if (pick < 0.7) {
        s.kind = StrategyKind::feedback;
        for (auto& a : s.feedback_coeffs) a = 6.0 * rng::uniform01(gen) - 3.0;
        return s;
    }
    s.kind = StrategyKind::randomized_mixture;
    const double w = rng::uniform01(gen);
    s.weights = {w, 1.0 - w};
    for (int c = 0; c < 2; ++c) {
        StrategyParams comp;
        comp.kind = StrategyKind::open_loop;
        comp.rate_bound = bound;
        comp.open_loop_rates.resize(n_steps);
        for (auto& r : comp.open_loop_rates) r = bound * (2.0 * rng::uniform01(gen) - 1.0);
        s.components.push_back(std::move(comp));
    }
    return s;
}

// ---------------------------------------------------------------------------
// 1. market-bound dominance
// ---------------------------------------------------------------------------
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n_steps = 32, n_strategies = 1000, n_paths = 100;
    const TimeGrid grid(n_steps);

    struct Setup {
        MarketConfig market;
        FrictionSpec friction;
    };
    std::vector<Setup> setups;
    {
        MarketConfig gbm;
        gbm.process.drift = {0.05};
        gbm.process.volatility = {0.35};
        gbm.price_map = {PriceMapKind::exponential_of_first_coordinate, 1.0, 1.0};
        setups.push_back({gbm, FrictionSpec::make(1.5, HKind::affine_positive, 0.3, 0.2)});

        MarketConfig raw;  // identity map: prices cross zero
        raw.process.drift = {0.0};
        raw.process.volatility = {1.0};
        raw.price_map = {PriceMapKind::identity, 0.0, 0.0};
        setups.push_back({raw, FrictionSpec::make(2.0, HKind::constant, 0.7)});

        MarketConfig jump;
        jump.process.kind = ProcessKind::jump_diffusion;
        jump.process.drift = {0.02};
        jump.process.volatility = {0.25};
        jump.process.jump_rate = 2.0;
        jump.process.jump_mean = -0.05;
        jump.process.jump_scale = 0.15;
        jump.price_map = {PriceMapKind::exponential_of_first_coordinate, 1.0, 1.0};
        setups.push_back({jump, FrictionSpec::make(3.0, HKind::linear_in_price, 0.5)});
    }

    std::mt19937_64 gen(424242);
    double worst = -1e300;
    std::size_t pairs = 0;
    bool ok = true;
    for (const auto& setup : setups) {
        std::vector<PricePath> paths;
        std::vector<double> bounds;
        for (std::size_t i = 0; i < n_paths; ++i) {
            const auto d = sample_driving_path(setup.market.process, grid, 9000 + i);
            paths.push_back(price_from_driving(d, setup.market.price_map));
            bounds.push_back(market_bound(paths.back(), setup.friction));
        }
        for (std::size_t s = 0; s < n_strategies; ++s) {
            const auto strat = random_strategy(gen, n_steps, 50.0);
            const double u = rng::uniform01(gen);
            for (std::size_t i = 0; i < n_paths; ++i) {
                const double x1 =
                    simulate_terminal_money(strat, paths[i], setup.friction, u);
                const double slack = bounds[i] - x1;
                worst = std::max(worst, -slack);
                if (x1 > bounds[i] + 1e-9 * (1.0 + std::fabs(bounds[i]))) ok = false;
                ++pairs;
            }
        }
    }
    char note[160];
    std::snprintf(note, sizeof note, "%zu (strategy,path) pairs, worst excess %.2e",
                  pairs, worst);
    report(1, "market-bound dominance", ok, seconds_since(t0), 30.0, note);
}

// ---------------------------------------------------------------------------
// 2. conjugate vs brute-force sup on an x grid
// ---------------------------------------------------------------------------
void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(7);
    double worst = 0.0;
    bool ok = true;

    auto grid_sup = [](double hs, double alpha, double y, double lo, double hi,
                       double step) {
        double best = 0.0, best_x = 0.0;
        for (double x = lo; x <= hi; x += step) {
            const double v = x * y - hs * std::pow(std::fabs(x), alpha);
            if (v > best) {
                best = v;
                best_x = x;
            }
        }
        return std::pair<double, double>(best, best_x);
    };

    for (int trial = 0; trial < 1000; ++trial) {
        const double alpha = 1.4 + 1.6 * rng::uniform01(gen);
        const double y = (0.3 + 1.2 * rng::uniform01(gen)) *
                         (rng::uniform01(gen) < 0.5 ? -1.0 : 1.0);
        const double s = 0.5 + 1.5 * rng::uniform01(gen);
        FrictionSpec spec;
        const double h_pick = rng::uniform01(gen);
        if (h_pick < 0.4) {
            spec = FrictionSpec::make(alpha, HKind::constant, 0.2 + 1.8 * rng::uniform01(gen));
        } else if (h_pick < 0.7) {
            spec = FrictionSpec::make(alpha, HKind::linear_in_price,
                                      0.4 + 0.6 * rng::uniform01(gen));
        } else {
            spec = FrictionSpec::make(alpha, HKind::affine_positive,
                                      0.2 + 0.8 * rng::uniform01(gen),
                                      0.5 * rng::uniform01(gen));
        }
        const double closed = conjugate_cost(s, y, spec);

        // coarse pass over [-100, 100], then a refinement window; the target
        // function is concave on each half-line so the coarse argmax brackets
        // the true maximiser
        const double hs = spec.h(s);
        const auto coarse = grid_sup(hs, alpha, y, -100.0, 100.0, 0.01);
        const auto fine = grid_sup(hs, alpha, y, coarse.second - 0.01,
                                   coarse.second + 0.01, 1e-6);
        const double brute = std::max(coarse.first, fine.first);

        worst = std::max(worst, std::fabs(closed - brute));
        if (std::fabs(closed - brute) > 1e-6) ok = false;
    }
    char note[120];
    std::snprintf(note, sizeof note, "1000 random (s,y,alpha,H) tuples, worst |diff| %.2e",
                  worst);
    report(2, "young-fenchel conjugate vs brute force", ok, seconds_since(t0), 10.0, note);
}

// ---------------------------------------------------------------------------
// 3. deterministic quadratic benchmark
// ---------------------------------------------------------------------------
void criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = parse_config_file(fs::path(PROJECT_SOURCE_DIR) /
                                       "configs/quadratic_benchmark.ini");
    const auto rep = optimize(cfg.problem, cfg.optimizer, cfg.base_seed);

    const double target = 1.0 / 24.0;
    const bool value_ok = std::fabs(rep.best_value - target) <= 0.02 * target;

    const TimeGrid grid(cfg.problem.n_steps);
    double l2 = 0.0;
    for (std::size_t k = 0; k < cfg.problem.n_steps; ++k) {
        const double s_k = 1.0 + grid.t(k);
        const double diff = rep.best_params.open_loop_rates[k] - (1.5 - s_k);
        l2 += diff * diff * grid.dt();
    }
    const bool rates_ok = std::sqrt(l2) <= 0.1;

    char note[160];
    std::snprintf(note, sizeof note,
                  "best_value %.7f vs 1/24 = %.7f (%.2f%% off), rate L2 distance %.4f",
                  rep.best_value, target, 100.0 * std::fabs(rep.best_value - target) / target,
                  std::sqrt(l2));
    report(3, "quadratic deterministic benchmark", value_ok && rates_ok,
           seconds_since(t0), 60.0, note);
}

// ---------------------------------------------------------------------------
// 4. choquet estimator vs the survival riemann oracle
// ---------------------------------------------------------------------------
void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    double worst_rel = 0.0;

    std::vector<double> lognormal(10000);
    {
        std::mt19937_64 gen(99);
        rng::NormalSampler normal;
        for (auto& x : lognormal) x = std::exp(0.1 + 0.6 * normal(gen));
    }
    std::vector<double> two_atom(10000, 0.0);
    for (std::size_t i = 0; i < 3000; ++i) two_atom[i * 3] = 1.0;

    const UtilitySpec u_pow{UtilitySide::plus, UtilityForm::power, 1.0, 0.88};
    const UtilitySpec u_id{UtilitySide::plus, UtilityForm::power, 1.0, 1.0};
    const std::vector<DistortionSpec> distortions = {
        {DistortionForm::identity, 1.0},
        {DistortionForm::power, 2.0},
        {DistortionForm::power, 0.5},
        {DistortionForm::inverse_s, 0.61},
    };

    for (const auto& w : distortions) {
        for (int which = 0; which < 2; ++which) {
            const auto& sample = which == 0 ? lognormal : two_atom;
            const auto& u = which == 0 ? u_pow : u_id;
            const double est = choquet_positive(sample, u, w);
            const double oracle = survival_riemann(sample, u, w);
            const double rel = std::fabs(est - oracle) / std::fabs(oracle);
            worst_rel = std::max(worst_rel, rel);
            if (rel > 1e-3) ok = false;
        }
    }
    char note[120];
    std::snprintf(note, sizeof note,
                  "8 (sample,distortion) pairs on a 1e6-point y grid, worst rel %.2e",
                  worst_rel);
    report(4, "choquet estimator vs survival oracle", ok, seconds_since(t0), 10.0, note);
}

// ---------------------------------------------------------------------------
// 5. no-distortion reduction to signed means
// ---------------------------------------------------------------------------
void criterion_5() {
    const auto t0 = std::chrono::steady_clock::now();
    CPTSpec spec;
    spec.u_plus = {UtilitySide::plus, UtilityForm::power, 1.0, 0.88};
    spec.u_minus = {UtilitySide::minus, UtilityForm::power, 1.0, 1.2};
    spec.delta1 = 1.2;

    std::mt19937_64 gen(31337);
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(400 * rng::uniform01(gen));
        std::vector<double> sample(n);
        for (auto& x : sample) x = 4.0 * rng::uniform01(gen) - 2.0;

        double mean_plus = 0.0, mean_minus = 0.0;
        for (double x : sample) {
            mean_plus += x > 0.0 ? spec.u_plus(x) : 0.0;
            mean_minus += x < 0.0 ? spec.u_minus(-x) : 0.0;
        }
        mean_plus /= static_cast<double>(n);
        mean_minus /= static_cast<double>(n);

        const auto cv = cpt_value(sample, spec);
        const double err = std::max(std::fabs(cv.v_plus - mean_plus),
                                    std::fabs(cv.v_minus - mean_minus));
        worst = std::max(worst, err);
        if (err > 1e-12) ok = false;
    }
    char note[120];
    std::snprintf(note, sizeof note, "1000 random samples, worst |diff| %.2e", worst);
    report(5, "no-distortion reduction to expectation", ok, seconds_since(t0), 5.0, note);
}

// ---------------------------------------------------------------------------
// 6. concave-case existence surrogate under grid refinement
// ---------------------------------------------------------------------------
void criterion_6() {
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = parse_config_file(fs::path(PROJECT_SOURCE_DIR) / "configs/gbm_concave.ini");

    double v[3] = {0, 0, 0}, se[3] = {0, 0, 0};
    const std::size_t grids[3] = {16, 32, 64};
    for (int i = 0; i < 3; ++i) {
        cfg.problem.n_steps = grids[i];
        const auto rep = optimize(cfg.problem, cfg.optimizer, cfg.base_seed);
        v[i] = rep.best_value;
        se[i] = rep.best_value_se;
    }
    const double pooled = std::sqrt(se[0] * se[0] + se[1] * se[1] + se[2] * se[2]);
    const bool cauchy_ok =
        std::fabs(v[2] - v[1]) <= std::fabs(v[1] - v[0]) + 3.0 * pooled;

    // doubling the rate clamp must not move the value
    cfg.problem.n_steps = 64;
    cfg.problem.strategy_template.rate_bound *= 2.0;
    const auto rep2 = optimize(cfg.problem, cfg.optimizer, cfg.base_seed);
    const double clamp_pool = std::sqrt(se[2] * se[2] +
                                        rep2.best_value_se * rep2.best_value_se);
    const bool clamp_ok = std::fabs(rep2.best_value - v[2]) < 3.0 * clamp_pool;

    char note[200];
    std::snprintf(note, sizeof note,
                  "v16 %.5f, v32 %.5f, v64 %.5f (se ~%.1e); |v64-v32| %.2e <= |v32-v16| "
                  "%.2e + 3se; clamp shift %.2e",
                  v[0], v[1], v[2], pooled, std::fabs(v[2] - v[1]), std::fabs(v[1] - v[0]),
                  std::fabs(rep2.best_value - v[2]));
    report(6, "concave-case surrogate: Cauchy in n_steps, clamp-insensitive",
           cauchy_ok && clamp_ok, seconds_since(t0), 600.0, note);
}

// ---------------------------------------------------------------------------
// 7. randomization benefit on the crafted two-outcome market
// ---------------------------------------------------------------------------

// CPT value of a finite-atom distribution straight from the survival
// definition; independent of the sample-based sorted-sum estimator.
double atom_cpt(std::vector<std::pair<double, double>> atoms, const CPTSpec& spec) {
    auto side_value = [](std::vector<std::pair<double, double>> side,
                         const UtilitySpec& u, const DistortionSpec& w) {
        std::sort(side.begin(), side.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        double cum = 0.0, acc = 0.0;
        for (const auto& [value, prob] : side) {
            acc += u(value) * (w(cum + prob) - w(cum));
            cum += prob;
        }
        return acc;
    };
    std::vector<std::pair<double, double>> gains, losses;
    for (const auto& [value, prob] : atoms) {
        if (value > 0.0)
            gains.push_back({value, prob});
        else if (value < 0.0)
            losses.push_back({-value, prob});
    }
    return side_value(gains, spec.u_plus, spec.w_plus) -
           side_value(losses, spec.u_minus, spec.w_minus);
}

void criterion_7() {
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = parse_config_file(fs::path(PROJECT_SOURCE_DIR) /
                                 "configs/crafted_randomization.ini");

    // Two-atom hand computation. A profile holding x shares bought before the
    // jump and sold after realizes X1 = mu x xi - H x^2 with mu half the price
    // gap and H the constant friction level.
    const double mu = cfg.problem.market.price_map.scale *
                      cfg.problem.market.process.jump_scale / 2.0;
    const double h = cfg.problem.friction.h0;
    const auto& cpt = cfg.problem.cpt;

    auto det_value = [&](double x) {
        return atom_cpt({{mu * x - h * x * x, 0.5}, {-(mu * x) - h * x * x, 0.5}}, cpt);
    };
    auto mix_value = [&](double x1, double x2) {
        return atom_cpt({{mu * x1 - h * x1 * x1, 0.25},
                         {-(mu * x1) - h * x1 * x1, 0.25},
                         {mu * x2 - h * x2 * x2, 0.25},
                         {-(mu * x2) - h * x2 * x2, 0.25}},
                        cpt);
    };

    double det_star = 0.0;
    for (double x = 0.0; x <= 3.0; x += 2e-4) det_star = std::max(det_star, det_value(x));
    double mix_star = 0.0, mx1 = 0, mx2 = 0;
    for (double x1 = 0.0; x1 <= 2.0; x1 += 5e-3)
        for (double x2 = 0.0; x2 <= 2.0; x2 += 5e-3) {
            const double val = mix_value(x1, x2);
            if (val > mix_star) {
                mix_star = val;
                mx1 = x1;
                mx2 = x2;
            }
        }
    for (double x1 = mx1 - 5e-3; x1 <= mx1 + 5e-3; x1 += 2e-4)
        for (double x2 = mx2 - 5e-3; x2 <= mx2 + 5e-3; x2 += 2e-4)
            mix_star = std::max(mix_star, mix_value(std::max(0.0, x1), std::max(0.0, x2)));

    const bool oracle_ok = mix_star > det_star + 0.004;

    // optimizer comparison on common scenarios
    const auto comparison = compare_randomized(cfg.problem, cfg.optimizer, cfg.base_seed);
    const bool strict_ok = comparison.gap > 1.0 * comparison.pooled_se;
    const bool sane_ok =
        std::fabs(comparison.deterministic.best_value - det_star) < 0.004 &&
        std::fabs(comparison.randomized.best_value - mix_star) < 0.004;

    // identity distortions on the same instance: the two arms must agree
    auto id_cfg = cfg;
    id_cfg.problem.cpt.w_plus = {DistortionForm::identity, 1.0};
    id_cfg.problem.cpt.w_minus = {DistortionForm::identity, 1.0};
    const auto id_cmp = compare_randomized(id_cfg.problem, id_cfg.optimizer, id_cfg.base_seed);
    const bool id_ok = std::fabs(id_cmp.gap) <= 3.0 * std::max(id_cmp.pooled_se, 1e-12);

    char note[240];
    std::snprintf(note, sizeof note,
                  "oracle det* %.5f < mix* %.5f; reported det %.5f, rand %.5f, gap %.4f "
                  "(%.1f pooled se); identity-distortion gap %.4f (%.1f pooled se)",
                  det_star, mix_star, comparison.deterministic.best_value,
                  comparison.randomized.best_value, comparison.gap,
                  comparison.gap / comparison.pooled_se, id_cmp.gap,
                  std::fabs(id_cmp.gap) / std::max(id_cmp.pooled_se, 1e-300));
    report(7, "randomization benefit under convex loss distortion",
           oracle_ok && strict_ok && sane_ok && id_ok, seconds_since(t0), 300.0, note);
}

// ---------------------------------------------------------------------------
// 8. liquidation projection and feedback unwind
// ---------------------------------------------------------------------------
void criterion_8() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(88);
    bool ok = true;
    double worst_sum = 0.0, worst_inv = 0.0;

    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 4 + static_cast<std::size_t>(60 * rng::uniform01(gen));
        const TimeGrid grid(n);
        std::vector<double> rates(n);
        for (auto& r : rates) r = 10.0 * rng::uniform01(gen) - 5.0;
        const auto projected = enforce_liquidation(rates, grid);
        double sum = 0.0;
        for (double r : projected) sum += r * grid.dt();
        worst_sum = std::max(worst_sum, std::fabs(sum));
        if (std::fabs(sum) > 1e-12) ok = false;
        const auto twice = enforce_liquidation(projected, grid);
        for (std::size_t k = 0; k < n; ++k)
            if (std::fabs(twice[k] - projected[k]) > 1e-12) ok = false;
    }

    const auto spec = FrictionSpec::make(2.0, HKind::constant, 0.4);
    MarketConfig market;
    market.process.drift = {0.05};
    market.process.volatility = {0.3};
    market.price_map = {PriceMapKind::exponential_of_first_coordinate, 1.0, 1.0};
    const TimeGrid grid(40);
    for (int trial = 0; trial < 1000; ++trial) {
        StrategyParams policy;
        policy.kind = StrategyKind::feedback;
        for (auto& a : policy.feedback_coeffs) a = 6.0 * rng::uniform01(gen) - 3.0;
        const auto driving = sample_driving_path(market.process, grid, 4000 + trial);
        const auto price = price_from_driving(driving, market.price_map);
        const auto out = simulate_wealth(policy, price, spec, rng::uniform01(gen));
        const double rel = std::fabs(out.terminal_inventory) / (1.0 + out.max_abs_rate);
        worst_inv = std::max(worst_inv, rel);
        if (rel > 1e-9) ok = false;
    }

    char note[140];
    std::snprintf(note, sizeof note,
                  "worst projected integral %.2e, worst relative terminal inventory %.2e",
                  worst_sum, worst_inv);
    report(8, "liquidation projection and unwind", ok, seconds_since(t0), 10.0, note);
}

// ---------------------------------------------------------------------------
// 9. byte-identical reruns
// ---------------------------------------------------------------------------
void criterion_9() {
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = parse_config_file(fs::path(PROJECT_SOURCE_DIR) /
                                 "configs/quadratic_benchmark.ini");
    cfg.dump_paths = true;

    auto cfg_a = cfg, cfg_b = cfg;
    cfg_a.out_dir = (fs::temp_directory_path() / "illiq_acc_run_a").string();
    cfg_b.out_dir = (fs::temp_directory_path() / "illiq_acc_run_b").string();
    fs::remove_all(cfg_a.out_dir);
    fs::remove_all(cfg_b.out_dir);

    const auto ma = run_experiment(cfg_a, RunMode::optimize);
    const auto mb = run_experiment(cfg_b, RunMode::optimize);

    bool ok = ma.files.size() == mb.files.size();
    std::size_t compared = 0;
    if (ok)
        for (std::size_t i = 0; i < ma.files.size(); ++i) {
            if (ma.files[i].file != mb.files[i].file ||
                ma.files[i].checksum != mb.files[i].checksum)
                ok = false;
            const auto bytes_a = read_file(fs::path(cfg_a.out_dir) / ma.files[i].file);
            const auto bytes_b = read_file(fs::path(cfg_b.out_dir) / mb.files[i].file);
            if (bytes_a != bytes_b || bytes_a.empty()) ok = false;
            ++compared;
        }

    char note[120];
    std::snprintf(note, sizeof note, "%zu output files byte-compared across two runs",
                  compared);
    report(9, "determinism: byte-identical reruns", ok, seconds_since(t0), 0.0, note);
}

} // namespace

int main() {
    std::printf("acceptance suite\n================\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("================\n%s (%d failure%s)\n",
                g_failures == 0 ? "ALL CRITERIA PASS" : "FAILURES PRESENT", g_failures,
                g_failures == 1 ? "" : "s");
    return g_failures;
}
