#include "illiq/frictions.hpp"

#include "illiq/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <stdexcept>

namespace illiq {

namespace {

// |x|^a with a fast path for the ubiquitous quadratic case.
inline double pow_abs(double x, double a) {
    if (a == 2.0) return x * x;
    return std::pow(std::fabs(x), a);
}

} // namespace

double FrictionSpec::h(double s) const {
    switch (h_kind) {
        case HKind::constant: return h0;
        case HKind::linear_in_price: return h0 * s;
        case HKind::affine_positive: return h0 + h1 * s;
    }
    return h0;
}

void FrictionSpec::validate() const {
    if (!std::isfinite(alpha) || alpha <= 1.0)
        throw std::invalid_argument("alpha must exceed 1");
    if (!std::isfinite(h0) || !std::isfinite(h1))
        throw std::invalid_argument("friction.h parameters must be finite");
    if (h_kind == HKind::constant && h0 <= 0.0)
        throw std::invalid_argument("friction.h0 must be positive for constant H");
    if (h_kind == HKind::linear_in_price && h0 <= 0.0)
        throw std::invalid_argument("friction.h0 must be positive for linear H");
    if (h_kind == HKind::affine_positive && (h0 <= 0.0 || h1 < 0.0))
        throw std::invalid_argument(
            "friction requires h0 > 0 and h1 >= 0 for affine_positive H");
    if (!std::isfinite(beta) || beta <= 1.0 || beta >= alpha)
        throw std::invalid_argument("beta must satisfy 1 < beta < alpha");
    const double expected_gamma = beta / (beta - 1.0);
    if (!std::isfinite(gamma) || std::fabs(gamma - expected_gamma) > 1e-9 * expected_gamma)
        throw std::invalid_argument("gamma must be the conjugate exponent of beta");
}

FrictionSpec FrictionSpec::make(double alpha, HKind h_kind, double h0, double h1,
                                double beta) {
    FrictionSpec spec;
    spec.alpha = alpha;
    spec.h_kind = h_kind;
    spec.h0 = h0;
    spec.h1 = h1;
    spec.beta = beta > 0.0 ? beta : 0.5 * (1.0 + alpha);
    spec.gamma = spec.beta / (spec.beta - 1.0);
    spec.validate();
    return spec;
}

double friction_cost(double s, double x, const FrictionSpec& spec) {
    if (!std::isfinite(s) || !std::isfinite(x))
        throw std::invalid_argument("friction_cost: inputs must be finite");
    return spec.h(s) * pow_abs(x, spec.alpha);
}

double conjugate_cost(double s, double y, const FrictionSpec& spec) {
    const double hs = spec.h(s);
    if (!(hs > 0.0))
        throw std::domain_error("conjugate_cost: H(s) must be positive");
    const double a = spec.alpha;
    const double c = (a - 1.0) / a * std::pow(a, 1.0 / (1.0 - a));
    return c * std::pow(hs, 1.0 / (1.0 - a)) * pow_abs(y, a / (a - 1.0));
}

double market_bound(const PricePath& price, const FrictionSpec& spec) {
    const std::size_t n = price.grid.n_steps();
    const double dt = price.grid.dt();
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        acc += conjugate_cost(price.s[k], -price.s[k], spec) * dt;
    return acc;
}

namespace {

// Per-path left-endpoint quadrature of the integrability integrand.
double integrability_path_value(const PricePath& price, const FrictionSpec& spec) {
    const std::size_t n = price.grid.n_steps();
    const double e_h = spec.beta / (spec.beta - spec.alpha);           // < 0
    const double e_s = spec.beta * spec.alpha / (spec.alpha - spec.beta);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = price.s[k];
        const double hs = spec.h(s);
        acc += std::pow(hs, e_h) * std::pow(1.0 + std::fabs(s), e_s);
    }
    return acc / static_cast<double>(n);
}

} // namespace

MomentReport integrability_diagnostic(const ProcessSpec& process,
                                      const PriceMapSpec& map,
                                      const FrictionSpec& spec,
                                      std::size_t n_paths, const TimeGrid& grid,
                                      std::uint64_t base_seed) {
    spec.validate();
    if (n_paths == 0) throw std::invalid_argument("integrability_diagnostic: n_paths == 0");

    std::vector<double> values(n_paths);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n_paths); ++i) {
        const auto path = sample_driving_path(process, grid, base_seed + static_cast<std::uint64_t>(i));
        const auto price = price_from_driving(path, map);
        values[static_cast<std::size_t>(i)] = integrability_path_value(price, spec);
    }

    MomentReport report;
    report.n_paths = n_paths;

    double sum = 0.0, sumsq = 0.0;
    for (double v : values) {
        sum += v;
        sumsq += v * v;
    }
    report.estimate = sum / static_cast<double>(n_paths);
    const double var =
        n_paths > 1
            ? (sumsq - sum * sum / static_cast<double>(n_paths)) / static_cast<double>(n_paths - 1)
            : 0.0;
    report.std_error = var > 0.0 ? std::sqrt(var / static_cast<double>(n_paths)) : 0.0;

    // Running estimates at n/4, n/2 and n paths; flag WARN when the last
    // doubling still moves the estimate by more than 3 standard errors.
    for (std::size_t cut : {n_paths / 4, n_paths / 2, n_paths}) {
        if (cut == 0) continue;
        double c = 0.0;
        for (std::size_t i = 0; i < cut; ++i) c += values[i];
        report.doubling_trail.push_back(c / static_cast<double>(cut));
    }
    if (report.doubling_trail.size() >= 2 && report.std_error > 0.0) {
        const double last = report.doubling_trail.back();
        const double prev = report.doubling_trail[report.doubling_trail.size() - 2];
        report.stabilized = std::fabs(last - prev) <= 3.0 * report.std_error;
    }
    return report;
}

double strategy_moment_diagnostic(const std::vector<std::vector<double>>& rates,
                                  const std::vector<PricePath>& prices,
                                  const FrictionSpec& spec) {
    if (rates.size() != prices.size())
        throw std::invalid_argument("strategy_moment_diagnostic: size mismatch");
    if (rates.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t p = 0; p < rates.size(); ++p) {
        const std::size_t n = prices[p].grid.n_steps();
        if (rates[p].size() != n)
            throw std::invalid_argument("strategy_moment_diagnostic: rates do not match the grid");
        double path_acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            path_acc += std::pow(std::fabs(rates[p][k]), spec.beta) *
                        std::pow(1.0 + std::fabs(prices[p].s[k]), spec.beta);
        acc += path_acc / static_cast<double>(n);
    }
    return acc / static_cast<double>(rates.size());
}

std::string to_string(HKind k) {
    switch (k) {
        case HKind::constant: return "constant";
        case HKind::linear_in_price: return "linear_in_price";
        case HKind::affine_positive: return "affine_positive";
    }
    return "?";
}

} // namespace illiq
