#include "illiq/cpt.hpp"

#include "illiq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace illiq {

double UtilitySpec::operator()(double x) const {
    switch (form) {
        case UtilityForm::power:
            return coeff * std::pow(x, exponent);
        case UtilityForm::exponential:
            return side == UtilitySide::plus
                       ? coeff * (1.0 - std::exp(-exponent * x))
                       : coeff * (std::exp(exponent * x) - 1.0);
    }
    return x;
}

void UtilitySpec::validate() const {
    if (!std::isfinite(coeff) || coeff <= 0.0)
        throw std::invalid_argument("utility.coeff must be positive");
    if (!std::isfinite(exponent) || exponent <= 0.0)
        throw std::invalid_argument("utility.exponent must be positive");
}

double DistortionSpec::operator()(double p) const {
    switch (form) {
        case DistortionForm::identity:
            return p;
        case DistortionForm::power:
            return std::pow(p, param);
        case DistortionForm::inverse_s: {
            if (p <= 0.0) return 0.0;
            if (p >= 1.0) return 1.0;
            const double a = std::pow(p, param);
            const double b = std::pow(1.0 - p, param);
            return a / std::pow(a + b, 1.0 / param);
        }
    }
    return p;
}

void DistortionSpec::validate() const {
    if (form == DistortionForm::power && (!std::isfinite(param) || param <= 0.0))
        throw std::invalid_argument("distortion.param must be positive for the power form");
    if (form == DistortionForm::inverse_s &&
        (!std::isfinite(param) || param <= 0.0 || param > 1.0))
        throw std::invalid_argument("distortion.param must lie in (0,1] for inverse_s");
}

void CPTSpec::validate(bool require_wellposed_order) const {
    u_plus.validate();
    u_minus.validate();
    w_plus.validate();
    w_minus.validate();
    if (u_plus.side != UtilitySide::plus || u_minus.side != UtilitySide::minus)
        throw std::invalid_argument("cpt utility sides are mislabelled");
    if (!(c1 > 0.0) || !(c3 > 0.0) || c2 < 0.0)
        throw std::invalid_argument("cpt certificate constants must satisfy c1,c3 > 0, c2 >= 0");
    if (!(delta1 > 0.0) || !(delta2 > 0.0))
        throw std::invalid_argument("cpt certificate exponents must be positive");
    if (require_wellposed_order && !(delta1 > delta2))
        throw std::invalid_argument("delta1 must exceed delta2");
}

double choquet_positive(const std::vector<double>& sample, const UtilitySpec& u,
                        const DistortionSpec& w) {
    if (sample.empty())
        throw std::invalid_argument("choquet_positive: empty sample");
    const std::size_t n = sample.size();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = sample[i];
        if (!std::isfinite(x) || x < 0.0)
            throw std::invalid_argument("choquet_positive: entries must be finite and >= 0");
        v[i] = u(x);
    }
    std::sort(v.begin(), v.end());
    // Ties are harmless: the distortion weights telescope.
    const double dn = static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double hi = w(static_cast<double>(n - i + 1) / dn);
        const double lo = w(static_cast<double>(n - i) / dn);
        acc += v[i - 1] * (hi - lo);
    }
    return acc;
}

CptValue cpt_value(const std::vector<double>& sample, const CPTSpec& spec) {
    if (sample.empty())
        throw std::invalid_argument("cpt_value: empty sample");
    std::vector<double> pos(sample.size()), neg(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (!std::isfinite(sample[i]))
            throw std::invalid_argument("cpt_value: entries must be finite");
        pos[i] = sample[i] > 0.0 ? sample[i] : 0.0;
        neg[i] = sample[i] < 0.0 ? -sample[i] : 0.0;
    }
    CptValue out;
    out.v_plus = choquet_positive(pos, spec.u_plus, spec.w_plus);
    out.v_minus = choquet_positive(neg, spec.u_minus, spec.w_minus);
    out.value = out.v_plus - out.v_minus;
    return out;
}

namespace {

// min over a dense grid of lhs(x) - rhs(x); negative => bound violated.
bool u_minus_bound_holds(const UtilitySpec& u_minus, double c1, double c2,
                         double delta1) {
    // {0} plus log-spaced points up to 1e6.
    if (u_minus(0.0) < -c2 - 1e-12) return false;
    const int points = 600;
    for (int i = 0; i <= points; ++i) {
        const double x =
            std::pow(10.0, -9.0 + 15.0 * static_cast<double>(i) / points);
        const double lhs = u_minus(x);
        const double rhs = c1 * std::pow(x, delta1) - c2;
        if (std::isfinite(lhs) && lhs < rhs - 1e-9 * std::max(1.0, std::fabs(rhs)))
            return false;
    }
    return true;
}

bool w_minus_bound_holds(const DistortionSpec& w_minus, double c3, double delta2) {
    const int points = 2000;
    for (int i = 0; i <= points; ++i) {
        const double p = static_cast<double>(i) / points;
        const double lhs = w_minus(p);
        const double rhs = c3 * std::pow(p, delta2);
        if (lhs < rhs - 1e-9) return false;
    }
    return true;
}

// Right derivative of u at 0; infinity for sublinear powers.
double slope_at_zero(const UtilitySpec& u) {
    if (u.form == UtilityForm::exponential) return u.coeff * u.exponent;
    if (u.exponent > 1.0) return 0.0;
    if (u.exponent == 1.0) return u.coeff;
    return std::numeric_limits<double>::infinity();
}

// x -> u_plus(x^+) - u_minus(x^-) is concave iff u_plus is concave, u_minus
// is convex, and the loss-side slope at 0 dominates the gain-side slope.
bool glued_utility_concave(const UtilitySpec& u_plus, const UtilitySpec& u_minus) {
    const bool plus_concave =
        u_plus.form == UtilityForm::exponential || u_plus.exponent <= 1.0;
    const bool minus_convex =
        u_minus.form == UtilityForm::exponential || u_minus.exponent >= 1.0;
    if (!plus_concave || !minus_convex) return false;
    return slope_at_zero(u_minus) >= slope_at_zero(u_plus) - 1e-12;
}

double bootstrap_se_choquet(const std::vector<double>& sample, const CPTSpec& spec,
                            std::uint64_t seed) {
    const std::size_t n = sample.size();
    const std::size_t resamples = 100;
    std::mt19937_64 gen(rng::stream_seed(seed, rng::kBootstrapStreamTag));
    std::vector<double> draws(n), values(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < n; ++i)
            draws[i] = sample[gen() % n];
        values[b] = choquet_positive(draws, spec.u_plus, spec.w_plus);
    }
    double sum = 0.0, sumsq = 0.0;
    for (double v : values) {
        sum += v;
        sumsq += v * v;
    }
    const double var = (sumsq - sum * sum / static_cast<double>(resamples)) /
                       static_cast<double>(resamples - 1);
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

} // namespace

bool concave_certificate_applies(const CPTSpec& spec) {
    return spec.w_plus.form == DistortionForm::identity &&
           spec.w_minus.form == DistortionForm::identity &&
           glued_utility_concave(spec.u_plus, spec.u_minus);
}

CertificateReport wellposedness_check(const CPTSpec& spec,
                                      const ProcessSpec& process,
                                      const PriceMapSpec& map,
                                      const BenchmarkSpec& bench,
                                      const FrictionSpec& friction,
                                      std::size_t n_paths, const TimeGrid& grid,
                                      std::uint64_t base_seed) {
    spec.validate(false);
    friction.validate();
    if (n_paths < 4)
        throw std::invalid_argument("wellposedness_check: n_paths must be at least 4");

    CertificateReport report;
    report.ordering_ok = spec.delta1 > spec.delta2 && spec.delta2 > 0.0;
    report.u_minus_bound_ok =
        u_minus_bound_holds(spec.u_minus, spec.c1, spec.c2, spec.delta1);
    report.w_minus_bound_ok = w_minus_bound_holds(spec.w_minus, spec.c3, spec.delta2);
    report.concave_route = concave_certificate_applies(spec);

    // Monte Carlo of V+([B-W]^+) and E W^+ with a doubling stabilization flag.
    std::vector<double> excess(n_paths), w_plus_part(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        const auto path = sample_driving_path(process, grid, base_seed + i);
        const auto price = price_from_driving(path, map);
        const double w = benchmark_from_driving(path, map, bench);
        const double b = market_bound(price, friction);
        excess[i] = std::max(b - w, 0.0);
        w_plus_part[i] = std::max(w, 0.0);
    }

    auto mean_of = [](const std::vector<double>& v, std::size_t cut) {
        double acc = 0.0;
        for (std::size_t i = 0; i < cut; ++i) acc += v[i];
        return acc / static_cast<double>(cut);
    };

    report.v_plus_excess = choquet_positive(excess, spec.u_plus, spec.w_plus);
    report.e_w_plus = mean_of(w_plus_part, n_paths);

    {
        double sum = 0.0, sumsq = 0.0;
        for (double w : w_plus_part) {
            sum += w;
            sumsq += w * w;
        }
        const double var = (sumsq - sum * sum / static_cast<double>(n_paths)) /
                           static_cast<double>(n_paths > 1 ? n_paths - 1 : 1);
        report.e_w_plus_se = var > 0.0 ? std::sqrt(var / static_cast<double>(n_paths)) : 0.0;
    }
    report.v_plus_excess_se = bootstrap_se_choquet(excess, spec, base_seed);

    // Half-sample vs full-sample drift beyond 3 SE flags non-stabilization.
    std::vector<double> half(excess.begin(), excess.begin() + n_paths / 2);
    const double v_half = choquet_positive(half, spec.u_plus, spec.w_plus);
    const double tol = 3.0 * std::max(report.v_plus_excess_se, 1e-12);
    report.mc_stabilized = std::fabs(report.v_plus_excess - v_half) <= tol;

    const bool constants_route =
        report.ordering_ok && report.u_minus_bound_ok && report.w_minus_bound_ok;
    if (!constants_route && !report.concave_route)
        report.verdict = Verdict::FAIL;
    else if (!report.mc_stabilized)
        report.verdict = Verdict::WARN;
    else
        report.verdict = Verdict::PASS;
    return report;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::PASS: return "PASS";
        case Verdict::WARN: return "WARN";
        case Verdict::FAIL: return "FAIL";
    }
    return "?";
}

std::string to_string(UtilityForm f) {
    return f == UtilityForm::power ? "power" : "exponential";
}

std::string to_string(DistortionForm f) {
    switch (f) {
        case DistortionForm::identity: return "identity";
        case DistortionForm::power: return "power";
        case DistortionForm::inverse_s: return "inverse_s";
    }
    return "?";
}

} // namespace illiq
