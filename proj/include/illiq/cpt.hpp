#pragma once

#include "illiq/frictions.hpp"
#include "illiq/market.hpp"

#include <cstdint>
#include <string>
#include <vector>

// CPT functional V(X) = V+(X^+) - V-(X^-) where
//   V+-(X) = int_0^inf w(P(u(X) >= y)) dy
// estimated from Monte Carlo samples by the sorted-sum Choquet form, plus the
// well-posedness certificate (loss-utility growth must dominate the loss
// distortion: delta1 > delta2).

namespace illiq {

enum class UtilitySide { plus, minus };
enum class UtilityForm {
    power,       // u(x) = coeff * x^exponent
    exponential  // plus side: coeff * (1 - exp(-exponent x));
                 // minus side: coeff * (exp(exponent x) - 1)
};

struct UtilitySpec {
    UtilitySide side = UtilitySide::plus;
    UtilityForm form = UtilityForm::power;
    double coeff = 1.0;     // > 0
    double exponent = 1.0;  // > 0

    double operator()(double x) const;  // x >= 0
    void validate() const;
};

enum class DistortionForm {
    identity,
    power,     // w(p) = p^param, param > 0
    inverse_s  // w(p) = p^g / (p^g + (1-p)^g)^(1/g), g in (0,1]
};

struct DistortionSpec {
    DistortionForm form = DistortionForm::identity;
    double param = 1.0;

    double operator()(double p) const;  // p in [0,1], w(0)=0, w(1)=1
    void validate() const;
};

struct CPTSpec {
    UtilitySpec u_plus{UtilitySide::plus};
    UtilitySpec u_minus{UtilitySide::minus};
    DistortionSpec w_plus;
    DistortionSpec w_minus;

    // Declared certificate constants: u_minus(x) >= c1 x^delta1 - c2 and
    // w_minus(p) >= c3 p^delta2.
    double c1 = 1.0, c2 = 0.0, delta1 = 1.0;
    double c3 = 1.0, delta2 = 1.0;

    void validate(bool require_wellposed_order = false) const;
};

// Empirical Choquet integral of a nonnegative sample: with v_(1) <= ... <=
// v_(n) the sorted values of u(sample_i),
//   sum_i v_(i) * [w((n-i+1)/n) - w((n-i)/n)].
// Equals the exact integral of w(empirical survival of u(X)). Negative or
// non-finite entries are rejected.
double choquet_positive(const std::vector<double>& sample, const UtilitySpec& u,
                        const DistortionSpec& w);

struct CptValue {
    double value = 0.0;
    double v_plus = 0.0;
    double v_minus = 0.0;
};

// Splits the sample into positive and negative parts (each padded with zeros
// for entries of the other sign, i.e. both Choquet integrals run over the
// full sample size).
CptValue cpt_value(const std::vector<double>& sample, const CPTSpec& spec);

enum class Verdict { PASS, WARN, FAIL };

struct CertificateReport {
    bool ordering_ok = false;       // delta1 > delta2 > 0
    bool u_minus_bound_ok = false;  // u-(x) >= c1 x^delta1 - c2 on the x grid
    bool w_minus_bound_ok = false;  // w-(p) >= c3 p^delta2 on the p grid
    bool concave_route = false;     // identity distortions + globally concave u
    double v_plus_excess = 0.0;     // MC estimate of V+([B-W]^+)
    double v_plus_excess_se = 0.0;
    double e_w_plus = 0.0;          // MC estimate of E W^+
    double e_w_plus_se = 0.0;
    bool mc_stabilized = true;
    Verdict verdict = Verdict::FAIL;
};

// True when both distortions are identity and x -> u+(x^+) - u-(x^-) is
// concave; such configurations are certified without the declared constants.
bool concave_certificate_applies(const CPTSpec& spec);

// Two certificates are accepted: the declared-constants route (delta1 >
// delta2 plus the minorant bounds, verified on dense grids: x log-spaced up
// to 1e6, p uniform on [0,1]) and the concave route (both distortions
// identity and the glued utility x -> u+(x^+) - u-(x^-) concave, checked
// structurally on the power/exponential forms). Monte Carlo estimates of
// V+([B-W]^+) and E W^+ carry stabilization flags. FAIL when neither route
// certifies; WARN when certified but the MC estimates have not settled under
// path-count doubling.
CertificateReport wellposedness_check(const CPTSpec& spec,
                                      const ProcessSpec& process,
                                      const PriceMapSpec& map,
                                      const BenchmarkSpec& bench,
                                      const FrictionSpec& friction,
                                      std::size_t n_paths, const TimeGrid& grid,
                                      std::uint64_t base_seed);

std::string to_string(Verdict v);
std::string to_string(UtilityForm f);
std::string to_string(DistortionForm f);

} // namespace illiq
