#include "illiq/optimizer.hpp"

#include "illiq/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace illiq {

namespace {

// Conservative lower bound on prices the configured (process, map) pair can
// produce; used to reject H kinds that need positive prices.
bool prices_strictly_positive(const ProcessSpec& process, const PriceMapSpec& map) {
    if (map.kind == PriceMapKind::exponential_of_first_coordinate) return true;
    auto apply_min = [&](double y_lo, double y_hi) {
        return std::min(map.apply(y_lo), map.apply(y_hi));
    };
    switch (process.kind) {
        case ProcessKind::binary_jump: {
            const double lo = std::min({0.0, process.jump_mean - process.jump_scale,
                                        process.jump_mean + process.jump_scale});
            const double hi = std::max({0.0, process.jump_mean - process.jump_scale,
                                        process.jump_mean + process.jump_scale});
            return apply_min(lo, hi) > 0.0;
        }
        case ProcessKind::brownian_drift:
        case ProcessKind::jump_diffusion: {
            const bool deterministic =
                process.vol_at(0) == 0.0 &&
                (process.kind == ProcessKind::brownian_drift || process.jump_rate == 0.0);
            if (!deterministic) return false;  // Gaussian support is unbounded
            const double y1 = process.drift_at(0);
            return apply_min(std::min(0.0, y1), std::max(0.0, y1)) > 0.0;
        }
    }
    return false;
}

} // namespace

void ProblemSpec::validate() const {
    market.process.validate();
    market.price_map.validate();
    market.benchmark.validate();
    friction.validate();
    cpt.validate(false);
    if (n_steps < 2) throw std::invalid_argument("n_steps must be at least 2");
    if (n_paths < 1) throw std::invalid_argument("n_paths must be at least 1");
    strategy_template.validate(n_steps);
    if (!allow_ill_posed && !concave_certificate_applies(cpt) && !(cpt.delta1 > cpt.delta2))
        throw std::invalid_argument("delta1 must exceed delta2 (set allow_ill_posed to override)");
    if (friction.h_kind != HKind::constant &&
        !prices_strictly_positive(market.process, market.price_map))
        throw std::invalid_argument(
            "H must be strictly positive on the price range; this price map can "
            "produce nonpositive prices");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// theta <-> StrategyParams. Decoding applies the liquidation projection to
// every open-loop rate block, so all evaluated candidates lie in the
// admissible class exactly.
struct ParamLayout {
    StrategyKind kind;
    std::size_t n_steps = 0;
    std::size_t n_components = 0;
    bool optimize_weights = false;

    static ParamLayout from_template(const StrategyParams& tmpl, std::size_t n_steps,
                                     bool optimize_weights) {
        ParamLayout lay;
        lay.kind = tmpl.kind;
        lay.n_steps = n_steps;
        lay.optimize_weights = optimize_weights && tmpl.kind == StrategyKind::randomized_mixture;
        if (tmpl.kind == StrategyKind::randomized_mixture) {
            lay.n_components = tmpl.components.size();
            for (const auto& c : tmpl.components)
                if (c.kind != StrategyKind::open_loop)
                    throw std::invalid_argument(
                        "optimizer mixtures must have open_loop components");
        }
        return lay;
    }

    std::size_t dim() const {
        switch (kind) {
            case StrategyKind::open_loop: return n_steps;
            case StrategyKind::feedback: return 4;
            case StrategyKind::randomized_mixture:
                return n_components * n_steps + (optimize_weights ? n_components : 0);
        }
        return 0;
    }

    std::vector<double> encode(const StrategyParams& p) const {
        std::vector<double> theta;
        theta.reserve(dim());
        switch (kind) {
            case StrategyKind::open_loop:
                theta = p.open_loop_rates;
                break;
            case StrategyKind::feedback:
                theta.assign(p.feedback_coeffs.begin(), p.feedback_coeffs.end());
                break;
            case StrategyKind::randomized_mixture:
                for (const auto& c : p.components)
                    theta.insert(theta.end(), c.open_loop_rates.begin(),
                                 c.open_loop_rates.end());
                if (optimize_weights)
                    theta.insert(theta.end(), p.weights.begin(), p.weights.end());
                break;
        }
        return theta;
    }

    StrategyParams decode(const std::vector<double>& theta, const StrategyParams& tmpl,
                          const TimeGrid& grid) const {
        StrategyParams p = tmpl;
        switch (kind) {
            case StrategyKind::open_loop: {
                p.open_loop_rates.assign(theta.begin(), theta.end());
                p.open_loop_rates = enforce_liquidation(p.open_loop_rates, grid);
                break;
            }
            case StrategyKind::feedback: {
                for (std::size_t i = 0; i < 4; ++i) p.feedback_coeffs[i] = theta[i];
                break;
            }
            case StrategyKind::randomized_mixture: {
                for (std::size_t c = 0; c < n_components; ++c) {
                    auto& rates = p.components[c].open_loop_rates;
                    rates.assign(theta.begin() + static_cast<long>(c * n_steps),
                                 theta.begin() + static_cast<long>((c + 1) * n_steps));
                    rates = enforce_liquidation(rates, grid);
                }
                if (optimize_weights) {
                    double sum = 0.0;
                    for (std::size_t c = 0; c < n_components; ++c) {
                        p.weights[c] = std::fabs(theta[n_components * n_steps + c]);
                        sum += p.weights[c];
                    }
                    if (sum <= 0.0)
                        for (auto& w : p.weights) w = 1.0 / static_cast<double>(n_components);
                    else
                        for (auto& w : p.weights) w /= sum;
                }
                break;
            }
        }
        return p;
    }
};

struct RestartResult {
    std::vector<double> best_theta;
    double best_value = kNegInf;
    std::vector<GenerationRow> trace;
    std::size_t n_evaluations = 0;
    std::string termination = "budget";
};

double finite_or_neg_inf(double v) { return std::isfinite(v) ? v : kNegInf; }

RestartResult run_restart(const ProblemSpec& problem, const OptimizerSettings& settings,
                          const ScenarioSet& scenarios, const ParamLayout& layout,
                          std::uint64_t search_seed) {
    const TimeGrid grid(problem.n_steps);
    const std::size_t dim = layout.dim();
    const std::size_t pop = std::max<std::size_t>(2, settings.population);
    const std::size_t n_elite = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(settings.elite_fraction *
                                                 static_cast<double>(pop))));

    std::vector<double> mean = layout.encode(problem.strategy_template);
    std::vector<double> spread(dim, settings.init_spread);

    std::mt19937_64 search_rng(search_seed);
    rng::NormalSampler normal;

    RestartResult result;
    result.best_theta = mean;

    std::vector<std::vector<double>> thetas(pop, std::vector<double>(dim));
    std::vector<StrategyParams> candidates(pop, problem.strategy_template);
    const bool has_open_loop_block = layout.kind != StrategyKind::feedback;

    for (std::size_t g = 0; g < settings.max_generations; ++g) {
        // Proposal sampling stays serial so the stream is thread-independent.
        for (std::size_t c = 0; c < pop; ++c)
            for (std::size_t d = 0; d < dim; ++d)
                thetas[c][d] = mean[d] + spread[d] * normal(search_rng);
        for (std::size_t c = 0; c < pop; ++c)
            candidates[c] = layout.decode(thetas[c], problem.strategy_template, grid);

        std::vector<double> values =
            evaluate_population(candidates, scenarios, problem.friction, problem.cpt);
        result.n_evaluations += pop;
        for (auto& v : values) v = finite_or_neg_inf(v);

        std::vector<std::size_t> order(pop);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return values[a] > values[b];  // ties keep the lower index first
        });

        std::vector<std::size_t> elite(order.begin(), order.begin() + static_cast<long>(n_elite));

        // Cesaro average of the elite open-loop rates as a stabilization
        // candidate; kept iff it improves on the worst elite.
        std::vector<double> ces_theta;
        double ces_value = kNegInf;
        if (has_open_loop_block && values[elite[0]] > kNegInf) {
            ces_theta.assign(dim, 0.0);
            for (std::size_t e : elite)
                for (std::size_t d = 0; d < dim; ++d) ces_theta[d] += thetas[e][d];
            for (double& x : ces_theta) x /= static_cast<double>(n_elite);
            const StrategyParams ces_params =
                layout.decode(ces_theta, problem.strategy_template, grid);
            ces_value = finite_or_neg_inf(evaluate_objective(
                ces_params, scenarios, problem.friction, problem.cpt));
            result.n_evaluations += 1;
        }

        bool ces_kept = false;
        if (ces_value > values[elite.back()]) {
            ces_kept = true;
            elite.pop_back();
        }

        double gen_best_value = values[order[0]];
        const std::vector<double>* gen_best_theta = &thetas[order[0]];
        if (ces_kept && ces_value > gen_best_value) {
            gen_best_value = ces_value;
            gen_best_theta = &ces_theta;
        }

        if (gen_best_value > result.best_value) {
            result.best_value = gen_best_value;
            result.best_theta = *gen_best_theta;
        }

        // Proposal update from the (possibly Cesaro-augmented) elite set.
        double elite_value_sum = 0.0;
        std::size_t elite_count = elite.size() + (ces_kept ? 1 : 0);
        for (std::size_t d = 0; d < dim; ++d) {
            double m = 0.0;
            for (std::size_t e : elite) m += thetas[e][d];
            if (ces_kept) m += ces_theta[d];
            m /= static_cast<double>(elite_count);
            double sq = 0.0;
            for (std::size_t e : elite) sq += (thetas[e][d] - m) * (thetas[e][d] - m);
            if (ces_kept) sq += (ces_theta[d] - m) * (ces_theta[d] - m);
            const double sd = std::sqrt(sq / static_cast<double>(elite_count));
            mean[d] = m;
            spread[d] = std::max(settings.spread_floor,
                                 settings.spread_smoothing * spread[d] +
                                     (1.0 - settings.spread_smoothing) * sd);
        }
        for (std::size_t e : elite) elite_value_sum += values[e];
        if (ces_kept) elite_value_sum += ces_value;

        // Diagnostics on the generation best: rate moment and bound slack.
        GenerationRow row;
        row.generation = g;
        row.best_value = result.best_value;
        row.gen_best_value = gen_best_value;
        row.elite_mean_value = elite_value_sum / static_cast<double>(elite_count);
        row.max_spread = *std::max_element(spread.begin(), spread.end());
        if (gen_best_value > kNegInf) {
            const StrategyParams best_params =
                layout.decode(*gen_best_theta, problem.strategy_template, grid);
            double moment = 0.0;
            double min_slack = std::numeric_limits<double>::infinity();
            for (const auto& sc : scenarios.scenarios) {
                SimExtras extras;
                const auto out = simulate_wealth_with_extras(best_params, sc.price,
                                                             problem.friction,
                                                             sc.u_draw, extras);
                moment += extras.rate_moment;
                min_slack = std::min(min_slack, sc.bound - out.terminal_money);
            }
            row.moment_diagnostic = moment / static_cast<double>(scenarios.size());
            row.min_bound_slack = min_slack;
        }
        result.trace.push_back(row);

        if (row.max_spread <= settings.spread_floor * (1.0 + 1e-12)) {
            result.termination = "spread_collapse";
            break;
        }
    }

    if (!std::isfinite(result.best_value)) result.termination = "no_feasible_evaluation";
    return result;
}

} // namespace

double bootstrap_cpt_se(const std::vector<double>& sample, const CPTSpec& spec,
                        std::size_t n_resamples, std::uint64_t seed) {
    if (sample.size() < 2 || n_resamples < 2) return 0.0;
    std::mt19937_64 gen(rng::stream_seed(seed, rng::kBootstrapStreamTag));
    const std::size_t n = sample.size();
    std::vector<double> draws(n), values(n_resamples);
    for (std::size_t b = 0; b < n_resamples; ++b) {
        for (std::size_t i = 0; i < n; ++i) draws[i] = sample[gen() % n];
        values[b] = cpt_value(draws, spec).value;
    }
    double sum = 0.0, sumsq = 0.0;
    for (double v : values) {
        sum += v;
        sumsq += v * v;
    }
    const double var = (sumsq - sum * sum / static_cast<double>(n_resamples)) /
                       static_cast<double>(n_resamples - 1);
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

OptimizationReport optimize(const ProblemSpec& problem, const OptimizerSettings& settings,
                            std::uint64_t base_seed) {
    const auto t0 = std::chrono::steady_clock::now();
    problem.validate();
    const TimeGrid grid(problem.n_steps);

    // Certificate gate; the ill-posed demo must opt in explicitly.
    const auto cert = wellposedness_check(
        problem.cpt, problem.market.process, problem.market.price_map,
        problem.market.benchmark, problem.friction,
        std::max<std::size_t>(64, problem.n_paths / 8), grid, base_seed);
    if (cert.verdict == Verdict::FAIL && !problem.allow_ill_posed)
        throw std::runtime_error(
            "well-posedness check FAILED; rerun with the ill-posed override to proceed");

    const ParamLayout layout = ParamLayout::from_template(
        problem.strategy_template, problem.n_steps, settings.optimize_weights);

    const ScenarioSet scenarios0 = build_scenarios(
        problem.market, problem.friction, grid, problem.n_paths, base_seed);

    std::size_t n_restarts = std::max<std::size_t>(1, settings.restarts);
    std::vector<RestartResult> results;
    results.reserve(n_restarts);
    std::size_t total_evals = 0;
    for (std::size_t r = 0; r < n_restarts; ++r) {
        const std::uint64_t scen_seed =
            r == 0 ? base_seed
                   : rng::splitmix64(base_seed ^ (rng::kRestartStreamTag + r));
        const ScenarioSet scen =
            r == 0 ? scenarios0
                   : build_scenarios(problem.market, problem.friction, grid,
                                     problem.n_paths, scen_seed);
        const std::uint64_t search_seed =
            rng::stream_seed(base_seed + 0x9E37 * r, rng::kSearchStreamTag);
        results.push_back(run_restart(problem, settings, scen, layout, search_seed));
        total_evals += results.back().n_evaluations;
    }

    // Restart winners compete on the restart-0 scenario set.
    std::size_t winner = 0;
    double winner_value = kNegInf;
    for (std::size_t r = 0; r < results.size(); ++r) {
        if (!std::isfinite(results[r].best_value)) continue;
        const StrategyParams p =
            layout.decode(results[r].best_theta, problem.strategy_template, grid);
        const double v = finite_or_neg_inf(
            evaluate_objective(p, scenarios0, problem.friction, problem.cpt));
        if (v > winner_value) {
            winner_value = v;
            winner = r;
        }
    }

    OptimizationReport report;
    report.base_seed = base_seed;
    report.n_evaluations = total_evals;
    report.termination = results[winner].termination;
    report.trace = std::move(results[winner].trace);
    report.best_params =
        layout.decode(results[winner].best_theta, problem.strategy_template, grid);

    if (!std::isfinite(winner_value)) {
        report.best_value = std::numeric_limits<double>::quiet_NaN();
        report.termination = "no_feasible_evaluation";
        report.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return report;
    }

    std::vector<double> sample;
    evaluate_objective_sample(report.best_params, scenarios0, problem.friction,
                              problem.cpt, sample);
    const CptValue cv = cpt_value(sample, problem.cpt);
    report.best_value = cv.value;
    report.v_plus = cv.v_plus;
    report.v_minus = cv.v_minus;
    report.final_sample = sample;
    report.best_value_se = bootstrap_cpt_se(sample, problem.cpt,
                                            settings.bootstrap_resamples, base_seed);

    report.final_bounds.resize(scenarios0.size());
    report.final_x1.resize(scenarios0.size());
    report.final_terminal_inventory.resize(scenarios0.size());
    std::vector<double> slack(scenarios0.size());
    for (std::size_t i = 0; i < scenarios0.size(); ++i) {
        const auto& sc = scenarios0.scenarios[i];
        const auto out = simulate_wealth(report.best_params, sc.price, problem.friction,
                                         sc.u_draw);
        report.final_bounds[i] = sc.bound;
        report.final_x1[i] = out.terminal_money;
        report.final_terminal_inventory[i] = out.terminal_inventory;
        slack[i] = sc.bound - out.terminal_money;
    }
    std::sort(slack.begin(), slack.end());
    const std::size_t n = slack.size();
    report.bound_slack_quantiles[0] = slack.front();
    report.bound_slack_quantiles[1] = slack[n / 4];
    report.bound_slack_quantiles[2] = slack[n / 2];
    report.bound_slack_quantiles[3] = slack[(3 * n) / 4];
    report.bound_slack_quantiles[4] = slack.back();

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

ComparisonReport compare_randomized(const ProblemSpec& problem,
                                    const OptimizerSettings& settings,
                                    std::uint64_t base_seed) {
    const TimeGrid grid(problem.n_steps);

    ProblemSpec randomized = problem;
    if (problem.strategy_template.kind != StrategyKind::randomized_mixture) {
        StrategyParams mix;
        mix.kind = StrategyKind::randomized_mixture;
        mix.rate_bound = problem.strategy_template.rate_bound;
        StrategyParams comp;
        comp.kind = StrategyKind::open_loop;
        comp.rate_bound = problem.strategy_template.rate_bound;
        comp.open_loop_rates.assign(problem.n_steps, 0.0);
        mix.components = {comp, comp};
        mix.weights = {0.5, 0.5};
        randomized.strategy_template = mix;
    }

    ProblemSpec deterministic = problem;
    StrategyParams open;
    open.kind = StrategyKind::open_loop;
    open.rate_bound = problem.strategy_template.rate_bound;
    open.open_loop_rates.assign(problem.n_steps, 0.0);
    deterministic.strategy_template = open;

    ComparisonReport report;
    report.randomized = optimize(randomized, settings, base_seed);
    report.deterministic = optimize(deterministic, settings, base_seed);
    report.gap = report.randomized.best_value - report.deterministic.best_value;
    report.pooled_se = std::sqrt(report.randomized.best_value_se * report.randomized.best_value_se +
                                 report.deterministic.best_value_se * report.deterministic.best_value_se);
    return report;
}

} // namespace illiq
