#include "illiq/market.hpp"

#include "illiq/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace illiq {

namespace {

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double broadcast(const std::vector<double>& v, std::size_t i, double fallback) {
    if (v.empty()) return fallback;
    if (v.size() == 1) return v[0];
    return v[i];
}

} // namespace

double ProcessSpec::drift_at(std::size_t i) const { return broadcast(drift, i, 0.0); }
double ProcessSpec::vol_at(std::size_t i) const { return broadcast(volatility, i, 0.0); }

void ProcessSpec::validate() const {
    if (dimension < 1)
        throw std::invalid_argument("process.dimension must be at least 1");
    if (!drift.empty() && drift.size() != 1 && drift.size() != dimension)
        throw std::invalid_argument("process.drift must have 1 or dimension entries");
    if (!volatility.empty() && volatility.size() != 1 && volatility.size() != dimension)
        throw std::invalid_argument("process.volatility must have 1 or dimension entries");
    if (!all_finite(drift) || !all_finite(volatility))
        throw std::invalid_argument("process parameters must be finite");
    for (double v : volatility)
        if (v < 0.0) throw std::invalid_argument("process.volatility entries must be nonnegative");
    if (!std::isfinite(jump_rate) || jump_rate < 0.0)
        throw std::invalid_argument("process.jump_rate must be finite and nonnegative");
    if (!std::isfinite(jump_mean) || !std::isfinite(jump_scale))
        throw std::invalid_argument("process jump parameters must be finite");
    if (jump_scale < 0.0)
        throw std::invalid_argument("process.jump_scale must be nonnegative");
}

double PriceMapSpec::apply(double y) const {
    switch (kind) {
        case PriceMapKind::identity: return y;
        case PriceMapKind::affine_of_first_coordinate: return base + scale * y;
        case PriceMapKind::exponential_of_first_coordinate: return base * std::exp(scale * y);
    }
    return y;
}

void PriceMapSpec::validate() const {
    if (!std::isfinite(base) || !std::isfinite(scale))
        throw std::invalid_argument("price_map parameters must be finite");
    if (kind == PriceMapKind::exponential_of_first_coordinate && base <= 0.0)
        throw std::invalid_argument("price_map.base must be positive for the exponential map");
}

void BenchmarkSpec::validate() const {
    if (!std::isfinite(coefficient))
        throw std::invalid_argument("benchmark.coefficient must be finite");
}

DrivingPath sample_driving_path(const ProcessSpec& spec, const TimeGrid& grid,
                                std::uint64_t seed) {
    spec.validate();
    const std::size_t n = grid.n_steps();
    const std::size_t m = spec.dimension;
    const double dt = grid.dt();
    const double sqrt_dt = std::sqrt(dt);

    DrivingPath path{grid, m, std::vector<double>((n + 1) * m, 0.0)};
    std::mt19937_64 gen(seed);
    rng::NormalSampler normal;

    switch (spec.kind) {
        case ProcessKind::brownian_drift: {
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t c = 0; c < m; ++c) {
                    const double inc = spec.drift_at(c) * dt +
                                       spec.vol_at(c) * sqrt_dt * normal(gen);
                    path.values[(k + 1) * m + c] = path.values[k * m + c] + inc;
                }
            break;
        }
        case ProcessKind::jump_diffusion: {
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t c = 0; c < m; ++c) {
                    double inc = spec.drift_at(c) * dt +
                                 spec.vol_at(c) * sqrt_dt * normal(gen);
                    const long jumps = rng::poisson_count(gen, spec.jump_rate * dt, normal);
                    for (long j = 0; j < jumps; ++j)
                        inc += spec.jump_mean + spec.jump_scale * normal(gen);
                    path.values[(k + 1) * m + c] = path.values[k * m + c] + inc;
                }
            break;
        }
        case ProcessKind::binary_jump: {
            // One Rademacher jump of the first coordinate at the first grid
            // point with t_k >= 1/2 (right-continuous convention).
            const std::size_t k_jump = (n + 1) / 2;
            const double sign = rng::uniform01(gen) < 0.5 ? -1.0 : 1.0;
            const double value = spec.jump_mean + sign * spec.jump_scale;
            for (std::size_t k = k_jump; k <= n; ++k)
                path.values[k * m] = value;
            break;
        }
    }
    return path;
}

PricePath price_from_driving(const DrivingPath& path, const PriceMapSpec& map) {
    map.validate();
    const std::size_t n = path.grid.n_steps();
    PricePath price{path.grid, std::vector<double>(n + 1)};
    for (std::size_t k = 0; k <= n; ++k) {
        const double s = map.apply(path.at(k, 0));
        if (!std::isfinite(s))
            throw std::domain_error("price_from_driving: non-finite price");
        price.s[k] = s;
    }
    return price;
}

double benchmark_from_driving(const DrivingPath& path, const PriceMapSpec& map,
                              const BenchmarkSpec& bench) {
    bench.validate();
    switch (bench.kind) {
        case BenchmarkKind::zero: return 0.0;
        case BenchmarkKind::constant: return bench.coefficient;
        case BenchmarkKind::terminal_price_multiple:
            return bench.coefficient * map.apply(path.at(path.grid.n_steps(), 0));
        case BenchmarkKind::path_average_multiple: {
            const std::size_t n = path.grid.n_steps();
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += map.apply(path.at(k, 0));
            return bench.coefficient * acc / static_cast<double>(n);
        }
    }
    return 0.0;
}

std::string to_string(ProcessKind k) {
    switch (k) {
        case ProcessKind::brownian_drift: return "brownian_drift";
        case ProcessKind::jump_diffusion: return "jump_diffusion";
        case ProcessKind::binary_jump: return "binary_jump";
    }
    return "?";
}

std::string to_string(PriceMapKind k) {
    switch (k) {
        case PriceMapKind::identity: return "identity";
        case PriceMapKind::affine_of_first_coordinate: return "affine";
        case PriceMapKind::exponential_of_first_coordinate: return "exponential";
    }
    return "?";
}

std::string to_string(BenchmarkKind k) {
    switch (k) {
        case BenchmarkKind::zero: return "zero";
        case BenchmarkKind::constant: return "constant";
        case BenchmarkKind::terminal_price_multiple: return "terminal_price_multiple";
        case BenchmarkKind::path_average_multiple: return "path_average_multiple";
    }
    return "?";
}

} // namespace illiq
