#pragma once

#include "illiq/frictions.hpp"
#include "illiq/market.hpp"

#include <array>
#include <string>
#include <vector>

// Trading-rate strategies and the pathwise money/inventory recursion
//   inventory[k+1] = inventory[k] + rate_k * dt
//   money[k+1]     = money[k] - rate_k * s_k * dt - H(s_k)|rate_k|^alpha * dt.
// Rates may read only time-t_k observables (price and inventory at t_k, the
// grid time, and the strategy's own uniform draw), which enforces progressive
// measurability structurally.

namespace illiq {

enum class StrategyKind { open_loop, feedback, randomized_mixture };

struct StrategyParams {
    StrategyKind kind = StrategyKind::open_loop;

    // open_loop: one rate per grid cell
    std::vector<double> open_loop_rates;

    // feedback: rate = a0 + a1 * s_k + a2 * inventory_k + a3 * t_k
    std::array<double, 4> feedback_coeffs{0.0, 0.0, 0.0, 0.0};

    // randomized_mixture: component selected once per scenario by the uniform
    // draw (CDF inversion over weights)
    std::vector<StrategyParams> components;
    std::vector<double> weights;

    double rate_bound = 1000.0;  // clamp M on policy-emitted rates

    // Feedback policies (or mixtures containing one) cannot be projected onto
    // zero terminal inventory in advance, so their last ceil(n/8) cells are
    // overridden by a constant unwind rate.
    bool needs_unwind() const;
    void validate(std::size_t n_steps) const;
};

struct WealthOutcome {
    double terminal_money = 0.0;      // X1
    double terminal_inventory = 0.0;
    double bound = 0.0;               // B on the same path
    double max_abs_rate = 0.0;        // includes any unwind override
    double total_friction = 0.0;
};

// Rate emitted at cell k. Mixture selection uses u_draw; the emitted rate is
// clamped to [-M, M].
double evaluate_rate(const StrategyParams& params, std::size_t k, double t_k,
                     double s_k, double inventory_k, double u_draw);

// Runs the money/inventory recursion on one path. The unwind override (when
// params.needs_unwind()) is exempt from the rate clamp so that terminal
// inventory is zeroed exactly; it still enters max_abs_rate.
WealthOutcome simulate_wealth(const StrategyParams& params, const PricePath& price,
                              const FrictionSpec& spec, double u_draw,
                              double z0 = 0.0, double z1 = 0.0);

// Terminal money only; the caller supplies the market bound separately.
double simulate_terminal_money(const StrategyParams& params, const PricePath& price,
                               const FrictionSpec& spec, double u_draw);

// Per-path extras for diagnostics traces.
struct SimExtras {
    double rate_moment = 0.0;  // (1/n) sum_k |rate_k|^beta (1+|s_k|)^beta
};
WealthOutcome simulate_wealth_with_extras(const StrategyParams& params,
                                          const PricePath& price,
                                          const FrictionSpec& spec, double u_draw,
                                          SimExtras& extras);

// Removes the time average so that sum rate_k * dt = 0 exactly; idempotent.
std::vector<double> enforce_liquidation(const std::vector<double>& rates,
                                        const TimeGrid& grid);

// Arithmetic mean per grid cell over a nonempty set of open-loop rate vectors.
std::vector<double> cesaro_average(const std::vector<std::vector<double>>& strategies);

std::string to_string(StrategyKind k);

} // namespace illiq
