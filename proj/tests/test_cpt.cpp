#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "illiq/cpt.hpp"
#include "illiq/rng.hpp"
#include "survival_oracle.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace illiq;

namespace {

const UtilitySpec kIdPlus{UtilitySide::plus, UtilityForm::power, 1.0, 1.0};
const UtilitySpec kIdMinus{UtilitySide::minus, UtilityForm::power, 1.0, 1.0};
const DistortionSpec kIdentity{DistortionForm::identity, 1.0};

CPTSpec identity_spec() {
    CPTSpec spec;
    spec.u_plus = kIdPlus;
    spec.u_minus = kIdMinus;
    spec.w_plus = kIdentity;
    spec.w_minus = kIdentity;
    return spec;
}

std::vector<double> lognormal_sample(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    rng::NormalSampler normal;
    std::vector<double> out(n);
    for (auto& x : out) x = std::exp(0.1 + 0.6 * normal(gen));
    return out;
}

} // namespace

TEST_CASE("utility forms") {
    const UtilitySpec pow_u{UtilitySide::plus, UtilityForm::power, 2.0, 0.5};
    CHECK(pow_u(4.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(pow_u(0.0) == 0.0);

    const UtilitySpec exp_plus{UtilitySide::plus, UtilityForm::exponential, 1.0, 1.0};
    const UtilitySpec exp_minus{UtilitySide::minus, UtilityForm::exponential, 1.0, 1.0};
    CHECK(exp_plus(1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(exp_minus(1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
    CHECK(exp_plus(0.0) == 0.0);
    CHECK(exp_minus(0.0) == 0.0);

    UtilitySpec bad = pow_u;
    bad.coeff = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = pow_u;
    bad.exponent = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("distortion forms stay inside [0,1] with fixed endpoints") {
    for (const DistortionSpec w : {DistortionSpec{DistortionForm::identity, 1.0},
                                   DistortionSpec{DistortionForm::power, 2.0},
                                   DistortionSpec{DistortionForm::power, 0.5},
                                   DistortionSpec{DistortionForm::inverse_s, 0.61}}) {
        CHECK(w(0.0) == 0.0);
        CHECK(w(1.0) == doctest::Approx(1.0).epsilon(1e-12));
        double prev = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double v = w(i / 100.0);
            CHECK(v >= -1e-15);
            CHECK(v <= 1.0 + 1e-12);
            CHECK(v >= prev - 1e-12);  // the shipped forms are nondecreasing
            prev = v;
        }
    }
    DistortionSpec bad{DistortionForm::inverse_s, 1.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("two-atom choquet equals w at the atom probability") {
    // 3 ones among 10 samples, u = id, w(p) = p^2: value w(0.3) = 0.09
    std::vector<double> sample(10, 0.0);
    sample[2] = sample[5] = sample[9] = 1.0;
    const DistortionSpec w{DistortionForm::power, 2.0};
    CHECK(choquet_positive(sample, kIdPlus, w) == doctest::Approx(0.09).epsilon(1e-12));
}

TEST_CASE("identity distortion reduces the choquet integral to the mean") {
    std::mt19937_64 gen(17);
    const UtilitySpec u{UtilitySide::plus, UtilityForm::power, 1.0, 0.88};
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(500 * rng::uniform01(gen));
        std::vector<double> sample(n);
        for (auto& x : sample) x = 3.0 * rng::uniform01(gen);
        double mean = 0.0;
        for (double x : sample) mean += u(x);
        mean /= static_cast<double>(n);
        CHECK(std::fabs(choquet_positive(sample, u, kIdentity) - mean) <= 1e-12);
    }
}

TEST_CASE("sorted-sum estimator matches the survival riemann oracle") {
    const auto sample = lognormal_sample(10000, 99);
    const UtilitySpec u{UtilitySide::plus, UtilityForm::power, 1.0, 0.88};
    const DistortionSpec w{DistortionForm::inverse_s, 0.61};
    const double est = choquet_positive(sample, u, w);
    const double oracle = survival_riemann(sample, u, w);
    CHECK(std::fabs(est - oracle) <= 1e-3 * std::fabs(oracle));
}

TEST_CASE("cpt value splits signs and reduces to the mean without distortion") {
    SUBCASE("all-positive sample has no loss term") {
        const auto cv = cpt_value({1.0, 2.0, 3.0}, identity_spec());
        CHECK(cv.v_minus == 0.0);
        CHECK(cv.value == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("identity u and w reproduce the sample mean") {
        std::mt19937_64 gen(3);
        std::vector<double> sample(999);
        for (auto& x : sample) x = 4.0 * rng::uniform01(gen) - 2.0;
        double mean = 0.0;
        for (double x : sample) mean += x;
        mean /= static_cast<double>(sample.size());
        CHECK(std::fabs(cpt_value(sample, identity_spec()).value - mean) <= 1e-12);
    }
    SUBCASE("hand-evaluated two-point sample") {
        // sample (2, -1), u = id, w+ = id, w- = sqrt: V+ = 1 and
        // V- = integral of w-(P(X^- >= y)) dy = sqrt(1/2), so V = 1 - sqrt(1/2).
        CPTSpec spec = identity_spec();
        spec.w_minus = {DistortionForm::power, 0.5};
        spec.delta1 = 1.0;
        spec.delta2 = 0.5;
        const auto cv = cpt_value({2.0, -1.0}, spec);
        CHECK(cv.v_plus == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(cv.v_minus == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
        CHECK(cv.value == doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-12));

        // cross-check the loss side against the survival oracle
        const double oracle =
            survival_riemann({1.0, 0.0}, spec.u_minus, spec.w_minus, 200000);
        CHECK(std::fabs(cv.v_minus - oracle) <= 1e-3);
    }
}

TEST_CASE("monotonicity: enlarging every entry never decreases the value") {
    std::mt19937_64 gen(12);
    CPTSpec spec;
    spec.u_plus = {UtilitySide::plus, UtilityForm::power, 1.0, 0.88};
    spec.u_minus = {UtilitySide::minus, UtilityForm::power, 1.0, 1.2};
    spec.w_plus = {DistortionForm::inverse_s, 0.61};
    spec.w_minus = {DistortionForm::inverse_s, 0.69};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> sample(60), bigger(60);
        for (std::size_t i = 0; i < sample.size(); ++i) {
            sample[i] = 6.0 * rng::uniform01(gen) - 3.0;
            bigger[i] = sample[i] + 2.0 * rng::uniform01(gen);
        }
        CHECK(cpt_value(bigger, spec).value >= cpt_value(sample, spec).value - 1e-12);
    }
}

TEST_CASE("positive homogeneity under identity utility") {
    std::mt19937_64 gen(21);
    const DistortionSpec w{DistortionForm::inverse_s, 0.7};
    std::vector<double> sample(200);
    for (auto& x : sample) x = 5.0 * rng::uniform01(gen);
    const double base = choquet_positive(sample, kIdPlus, w);
    for (const double c : {0.25, 2.0, 17.5}) {
        std::vector<double> scaled(sample.size());
        for (std::size_t i = 0; i < sample.size(); ++i) scaled[i] = c * sample[i];
        CHECK(std::fabs(choquet_positive(scaled, kIdPlus, w) - c * base) <=
              1e-12 * std::max(1.0, c * std::fabs(base)));
    }
}

TEST_CASE("estimator error shrinks like a root-n monte carlo rate") {
    // X ~ exponential(1), u = id, w(p) = p^2 has the closed form
    // integral_0^inf exp(-2y) dy = 1/2.
    const DistortionSpec w{DistortionForm::power, 2.0};
    const double truth = 0.5;
    const int n_scales = 10, reps = 48;

    std::vector<double> log_n, log_err;
    for (int scale = 0; scale < n_scales; ++scale) {
        const std::size_t n = 64u << scale;
        double err = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
            std::mt19937_64 gen(100000 + scale * 1000 + rep);
            std::vector<double> sample(n);
            for (auto& x : sample) {
                double u01 = rng::uniform01(gen);
                while (u01 <= 0.0) u01 = rng::uniform01(gen);
                x = -std::log(u01);
            }
            err += std::fabs(choquet_positive(sample, kIdPlus, w) - truth);
        }
        log_n.push_back(std::log(static_cast<double>(n)));
        log_err.push_back(std::log(err / reps));
    }
    double mx = 0, my = 0;
    for (int i = 0; i < n_scales; ++i) {
        mx += log_n[i];
        my += log_err[i];
    }
    mx /= n_scales;
    my /= n_scales;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < n_scales; ++i) {
        sxy += (log_n[i] - mx) * (log_err[i] - my);
        sxx += (log_n[i] - mx) * (log_n[i] - mx);
    }
    const double slope = sxy / sxx;
    CHECK(slope > -0.7);
    CHECK(slope < -0.3);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(choquet_positive({}, kIdPlus, kIdentity), std::invalid_argument);
    CHECK_THROWS_AS(choquet_positive({1.0, -0.5}, kIdPlus, kIdentity), std::invalid_argument);
    CHECK_THROWS_AS(choquet_positive({1.0, INFINITY}, kIdPlus, kIdentity),
                    std::invalid_argument);
    CHECK_THROWS_AS(cpt_value({}, identity_spec()), std::invalid_argument);
    CHECK_THROWS_AS(cpt_value({std::nan("")}, identity_spec()), std::invalid_argument);
}

namespace {

CertificateReport check_spec(const CPTSpec& spec) {
    ProcessSpec process;
    process.drift = {0.05};
    process.volatility = {0.2};
    const PriceMapSpec map{PriceMapKind::exponential_of_first_coordinate, 1.0, 1.0};
    const BenchmarkSpec bench{BenchmarkKind::zero, 0.0};
    const auto friction = FrictionSpec::make(2.0, HKind::constant, 0.5);
    return wellposedness_check(spec, process, map, bench, friction, 512, TimeGrid(16), 7);
}

} // namespace

TEST_CASE("wellposedness certificate") {
    SUBCASE("declared bounds holding with equality pass") {
        CPTSpec spec;
        spec.u_plus = {UtilitySide::plus, UtilityForm::power, 1.0, 0.9};
        spec.u_minus = {UtilitySide::minus, UtilityForm::power, 1.0, 0.9};
        spec.w_plus = kIdentity;
        spec.w_minus = {DistortionForm::power, 0.5};
        spec.c1 = 1.0;
        spec.c2 = 0.0;
        spec.delta1 = 0.9;
        spec.c3 = 1.0;
        spec.delta2 = 0.5;
        const auto report = check_spec(spec);
        CHECK(report.ordering_ok);
        CHECK(report.u_minus_bound_ok);
        CHECK(report.w_minus_bound_ok);
        CHECK(report.verdict == Verdict::PASS);
    }
    SUBCASE("reversed exponents fail on ordering") {
        CPTSpec spec;
        spec.u_plus = {UtilitySide::plus, UtilityForm::power, 1.0, 0.5};
        spec.u_minus = {UtilitySide::minus, UtilityForm::power, 1.0, 0.5};
        spec.w_plus = kIdentity;
        spec.w_minus = {DistortionForm::power, 0.9};
        spec.delta1 = 0.5;
        spec.delta2 = 0.9;
        const auto report = check_spec(spec);
        CHECK_FALSE(report.ordering_ok);
        CHECK(report.verdict == Verdict::FAIL);
    }
    SUBCASE("inverse-s against a declared power minorant") {
        // min over p of w(p)/p^0.61 for the inverse-s with g = 0.61 is
        // 2^(-(1-g)/g) ~ 0.642, so c3 = 0.5 passes the grid check.
        CPTSpec spec;
        spec.u_plus = {UtilitySide::plus, UtilityForm::power, 1.0, 0.88};
        spec.u_minus = {UtilitySide::minus, UtilityForm::power, 1.0, 0.88};
        spec.w_plus = {DistortionForm::inverse_s, 0.61};
        spec.w_minus = {DistortionForm::inverse_s, 0.61};
        spec.delta1 = 0.88;
        spec.c3 = 0.5;
        spec.delta2 = 0.61;

        double min_ratio = 1e300;
        for (int i = 1; i <= 5000; ++i) {
            const double p = i / 5000.0;
            min_ratio = std::min(min_ratio, spec.w_minus(p) / std::pow(p, 0.61));
        }
        CHECK(min_ratio == doctest::Approx(std::pow(2.0, -(1.0 - 0.61) / 0.61)).epsilon(1e-3));
        CHECK(min_ratio > 0.5);

        const auto report = check_spec(spec);
        CHECK(report.w_minus_bound_ok);
        CHECK(report.verdict == Verdict::PASS);

        // a declared constant above the true minimum is caught
        CPTSpec greedy = spec;
        greedy.c3 = 0.7;
        CHECK_FALSE(check_spec(greedy).w_minus_bound_ok);
    }
    SUBCASE("identity preferences pass through the concave route") {
        CPTSpec spec;  // defaults: identity u and w, delta1 = delta2 = 1
        const auto report = check_spec(spec);
        CHECK_FALSE(report.ordering_ok);
        CHECK(report.concave_route);
        CHECK(report.verdict == Verdict::PASS);
    }
    SUBCASE("sublinear loss utility with convex loss distortion fails both routes") {
        CPTSpec spec;
        spec.u_plus = {UtilitySide::plus, UtilityForm::power, 1.0, 0.9};
        spec.u_minus = {UtilitySide::minus, UtilityForm::power, 1.0, 0.5};
        spec.w_plus = kIdentity;
        spec.w_minus = {DistortionForm::power, 2.0};
        spec.delta1 = 0.5;
        spec.delta2 = 2.0;
        const auto report = check_spec(spec);
        CHECK_FALSE(report.concave_route);
        CHECK(report.verdict == Verdict::FAIL);
    }
    SUBCASE("overdeclared loss-utility growth is caught on the x grid") {
        CPTSpec spec;
        spec.u_plus = {UtilitySide::plus, UtilityForm::power, 1.0, 1.0};
        spec.u_minus = {UtilitySide::minus, UtilityForm::power, 1.0, 1.0};
        spec.w_plus = {DistortionForm::power, 0.9};  // disable the concave route
        spec.w_minus = kIdentity;
        spec.delta1 = 2.0;  // claims quadratic growth of a linear utility
        spec.delta2 = 1.0;
        const auto report = check_spec(spec);
        CHECK_FALSE(report.u_minus_bound_ok);
        CHECK(report.verdict == Verdict::FAIL);
    }
}
