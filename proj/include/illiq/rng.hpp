#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

// Seeding and sampling helpers. Streams are built from raw 64-bit counters
// (path i uses base_seed + i) so a scenario set can be extended without
// replaying earlier paths. Uniform and normal draws are produced from the
// engine's bit output directly; std::uniform_real_distribution and
// std::normal_distribution are implementation-defined and would tie results
// to a particular standard library.

namespace illiq::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Distinct named streams derived from one user-facing seed.
inline std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t tag) {
    return splitmix64(base_seed ^ tag);
}

inline constexpr std::uint64_t kUniformStreamTag = 0x554E4946844D31D5ULL;
inline constexpr std::uint64_t kSearchStreamTag = 0x5345415243482A0FULL;
inline constexpr std::uint64_t kBootstrapStreamTag = 0x424F4F54B5E11A73ULL;
inline constexpr std::uint64_t kRestartStreamTag = 0x52455354A7C2199BULL;

// 53-bit uniform in [0,1).
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Box-Muller with the usual pair cache.
class NormalSampler {
public:
    double operator()(std::mt19937_64& g) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(g);
        while (u1 <= 0.0) u1 = uniform01(g);
        const double u2 = uniform01(g);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Knuth product-of-uniforms for small means, normal approximation above 30
// where exp(-mean) would underflow.
inline long poisson_count(std::mt19937_64& g, double mean, NormalSampler& normal) {
    if (mean <= 0.0) return 0;
    if (mean > 30.0) {
        const double x = mean + std::sqrt(mean) * normal(g);
        return x > 0.0 ? static_cast<long>(std::llround(x)) : 0;
    }
    const double limit = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform01(g);
    } while (p > limit);
    return k - 1;
}

} // namespace illiq::rng
