#include "illiq/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace illiq {

bool StrategyParams::needs_unwind() const {
    if (kind == StrategyKind::feedback) return true;
    if (kind == StrategyKind::randomized_mixture)
        for (const auto& c : components)
            if (c.needs_unwind()) return true;
    return false;
}

void StrategyParams::validate(std::size_t n_steps) const {
    if (!(rate_bound > 0.0) || !std::isfinite(rate_bound))
        throw std::invalid_argument("strategy.rate_bound must be positive and finite");
    switch (kind) {
        case StrategyKind::open_loop: {
            if (open_loop_rates.size() != n_steps)
                throw std::invalid_argument("strategy.open_loop_rates must have n_steps entries");
            for (double r : open_loop_rates)
                if (!std::isfinite(r))
                    throw std::invalid_argument("strategy.open_loop_rates must be finite");
            break;
        }
        case StrategyKind::feedback: {
            for (double a : feedback_coeffs)
                if (!std::isfinite(a))
                    throw std::invalid_argument("strategy.feedback_coeffs must be finite");
            break;
        }
        case StrategyKind::randomized_mixture: {
            if (components.empty())
                throw std::invalid_argument("strategy mixture needs at least one component");
            if (weights.size() != components.size())
                throw std::invalid_argument("strategy mixture weights must match components");
            double sum = 0.0;
            for (double w : weights) {
                if (!std::isfinite(w) || w < 0.0)
                    throw std::invalid_argument("strategy mixture weights must be nonnegative");
                sum += w;
            }
            if (std::fabs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("strategy mixture weights must sum to 1");
            for (const auto& c : components) c.validate(n_steps);
            break;
        }
    }
}

namespace {

const StrategyParams& select_component(const StrategyParams& params, double u_draw) {
    double cum = 0.0;
    for (std::size_t i = 0; i < params.components.size(); ++i) {
        cum += params.weights[i];
        if (u_draw < cum) return params.components[i];
    }
    return params.components.back();
}

} // namespace

double evaluate_rate(const StrategyParams& params, std::size_t k, double t_k,
                     double s_k, double inventory_k, double u_draw) {
    double rate = 0.0;
    switch (params.kind) {
        case StrategyKind::open_loop:
            rate = params.open_loop_rates[k];
            break;
        case StrategyKind::feedback: {
            const auto& a = params.feedback_coeffs;
            rate = a[0] + a[1] * s_k + a[2] * inventory_k + a[3] * t_k;
            break;
        }
        case StrategyKind::randomized_mixture:
            rate = evaluate_rate(select_component(params, u_draw), k, t_k, s_k,
                                 inventory_k, u_draw);
            break;
    }
    return std::clamp(rate, -params.rate_bound, params.rate_bound);
}

namespace {

inline double pow_abs(double x, double a) {
    if (a == 2.0) return x * x;
    return std::pow(std::fabs(x), a);
}

struct SimResult {
    double money;
    double inventory;
    double max_abs_rate;
    double total_friction;
    double rate_moment;
};

SimResult run_recursion(const StrategyParams& params, const PricePath& price,
                        const FrictionSpec& spec, double u_draw, double z0,
                        double z1, bool want_moment) {
    const std::size_t n = price.grid.n_steps();
    const double dt = price.grid.dt();
    const bool unwind = params.needs_unwind();
    const std::size_t unwind_cells = (n + 7) / 8;  // ceil(n/8)
    const std::size_t k_unwind = unwind ? n - unwind_cells : n;

    // The mixture draw is shared across the whole path, so the component can
    // be resolved once; the clamp is the tightest bound along the chain.
    const StrategyParams* active = &params;
    double bound = params.rate_bound;
    while (active->kind == StrategyKind::randomized_mixture) {
        active = &select_component(*active, u_draw);
        bound = std::min(bound, active->rate_bound);
    }
    const bool open = active->kind == StrategyKind::open_loop;
    const double* rates = open ? active->open_loop_rates.data() : nullptr;
    const auto& a = active->feedback_coeffs;

    SimResult r{z0, z1, 0.0, 0.0, 0.0};
    double unwind_rate = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = price.s[k];
        double rate;
        if (unwind && k >= k_unwind) {
            if (k == k_unwind)
                unwind_rate = -r.inventory /
                              (static_cast<double>(n - k_unwind) * dt);
            rate = unwind_rate;
        } else if (open) {
            rate = std::clamp(rates[k], -bound, bound);
        } else {
            rate = std::clamp(a[0] + a[1] * s + a[2] * r.inventory +
                                  a[3] * price.grid.t(k),
                              -bound, bound);
        }
        const double g = spec.h(s) * pow_abs(rate, spec.alpha);
        r.money -= rate * s * dt + g * dt;
        r.inventory += rate * dt;
        r.total_friction += g * dt;
        r.max_abs_rate = std::max(r.max_abs_rate, std::fabs(rate));
        if (want_moment)
            r.rate_moment += std::pow(std::fabs(rate), spec.beta) *
                             std::pow(1.0 + std::fabs(s), spec.beta) * dt;
    }
    return r;
}

} // namespace

WealthOutcome simulate_wealth(const StrategyParams& params, const PricePath& price,
                              const FrictionSpec& spec, double u_draw, double z0,
                              double z1) {
    params.validate(price.grid.n_steps());
    const SimResult r = run_recursion(params, price, spec, u_draw, z0, z1, false);
    WealthOutcome out;
    out.terminal_money = r.money;
    out.terminal_inventory = r.inventory;
    out.bound = market_bound(price, spec);
    out.max_abs_rate = r.max_abs_rate;
    out.total_friction = r.total_friction;
    return out;
}

double simulate_terminal_money(const StrategyParams& params, const PricePath& price,
                               const FrictionSpec& spec, double u_draw) {
    return run_recursion(params, price, spec, u_draw, 0.0, 0.0, false).money;
}

WealthOutcome simulate_wealth_with_extras(const StrategyParams& params,
                                          const PricePath& price,
                                          const FrictionSpec& spec, double u_draw,
                                          SimExtras& extras) {
    const SimResult r = run_recursion(params, price, spec, u_draw, 0.0, 0.0, true);
    extras.rate_moment = r.rate_moment;
    WealthOutcome out;
    out.terminal_money = r.money;
    out.terminal_inventory = r.inventory;
    out.bound = market_bound(price, spec);
    out.max_abs_rate = r.max_abs_rate;
    out.total_friction = r.total_friction;
    return out;
}

std::vector<double> enforce_liquidation(const std::vector<double>& rates,
                                        const TimeGrid& grid) {
    if (rates.size() != grid.n_steps())
        throw std::invalid_argument("enforce_liquidation: rates do not match the grid");
    double mean = 0.0;
    for (double r : rates) {
        if (!std::isfinite(r))
            throw std::invalid_argument("enforce_liquidation: rates must be finite");
        mean += r;
    }
    mean /= static_cast<double>(rates.size());
    std::vector<double> out(rates.size());
    for (std::size_t k = 0; k < rates.size(); ++k) out[k] = rates[k] - mean;
    return out;
}

std::vector<double> cesaro_average(const std::vector<std::vector<double>>& strategies) {
    if (strategies.empty())
        throw std::invalid_argument("cesaro_average: empty strategy sequence");
    const std::size_t n = strategies.front().size();
    for (const auto& s : strategies)
        if (s.size() != n)
            throw std::invalid_argument("cesaro_average: unequal lengths");
    std::vector<double> out(n, 0.0);
    for (const auto& s : strategies)
        for (std::size_t k = 0; k < n; ++k) out[k] += s[k];
    for (double& x : out) x /= static_cast<double>(strategies.size());
    return out;
}

std::string to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::open_loop: return "open_loop";
        case StrategyKind::feedback: return "feedback";
        case StrategyKind::randomized_mixture: return "randomized_mixture";
    }
    return "?";
}

} // namespace illiq
