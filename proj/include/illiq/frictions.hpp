#pragma once

#include "illiq/market.hpp"
#include "illiq/time_grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Superlinear instantaneous friction g(s,x) = H(s)|x|^alpha, its convex
// conjugate, the pathwise market bound B = sum_k G*(s_k, -s_k) dt, and the
// moment diagnostics used to monitor integrability and strategy tightness.

namespace illiq {

enum class HKind {
    constant,         // H(s) = h0,            h0 > 0
    linear_in_price,  // H(s) = h0 * s,        needs s > 0
    affine_positive   // H(s) = h0 + h1 * s,   h0 > 0, h1 >= 0
};

struct FrictionSpec {
    double alpha = 2.0;  // > 1
    HKind h_kind = HKind::constant;
    double h0 = 1.0;
    double h1 = 0.0;
    double beta = 1.5;   // diagnostic exponent, 1 < beta < alpha
    double gamma = 3.0;  // conjugate of beta: 1/beta + 1/gamma = 1

    double h(double s) const;
    void validate() const;

    // beta defaults to the midpoint (1+alpha)/2 when not supplied.
    static FrictionSpec make(double alpha, HKind h_kind, double h0,
                             double h1 = 0.0, double beta = 0.0);
};

// H(s)|x|^alpha, >= 0, zero iff x = 0. Non-finite inputs rejected.
double friction_cost(double s, double x, const FrictionSpec& spec);

// sup_x (x y - H(s)|x|^alpha)
//   = ((alpha-1)/alpha) * alpha^(1/(1-alpha)) * H(s)^(1/(1-alpha))
//     * |y|^(alpha/(alpha-1)).
// H(s) <= 0 signals invalid friction at this price.
double conjugate_cost(double s, double y, const FrictionSpec& spec);

// Left-endpoint quadrature of G*_t(-S_t); dominates terminal money of any
// strategy on the same path cell by cell.
double market_bound(const PricePath& price, const FrictionSpec& spec);

struct MomentReport {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    bool stabilized = true;          // false => WARN: not settled under doubling
    std::vector<double> doubling_trail;  // running estimates at n/4, n/2, n paths
};

// Monte Carlo estimate of the integrability functional
//   E int_0^1 H^{beta/(beta-alpha)}(S_t) (1+|S_t|)^{beta*alpha/(alpha-beta)} dt
// with a doubling-scheme stabilization flag.
MomentReport integrability_diagnostic(const ProcessSpec& process,
                                      const PriceMapSpec& map,
                                      const FrictionSpec& spec,
                                      std::size_t n_paths, const TimeGrid& grid,
                                      std::uint64_t base_seed);

// Monte Carlo estimate of E int_0^1 |phi(t)|^beta (1+|S(t)|)^beta dt across
// (rates, prices) pairs sharing one grid; monitored per optimizer generation.
double strategy_moment_diagnostic(const std::vector<std::vector<double>>& rates,
                                  const std::vector<PricePath>& prices,
                                  const FrictionSpec& spec);

std::string to_string(HKind k);

} // namespace illiq
