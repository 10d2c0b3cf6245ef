#pragma once

#include "illiq/time_grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Driving process Y (independent increments), price path S = f(Y) and
// benchmark W = l(Y). Paths are stored right-continuously on the grid:
// values[k] = Y(t_k), and all downstream integrals read left endpoints.

namespace illiq {

enum class ProcessKind {
    brownian_drift,  // per-coordinate drift + Gaussian noise
    jump_diffusion,  // brownian_drift plus compound-Poisson jumps per cell
    binary_jump      // single +-jump of the first coordinate at t = 1/2
};

struct ProcessSpec {
    ProcessKind kind = ProcessKind::brownian_drift;
    std::size_t dimension = 1;
    std::vector<double> drift;       // per unit time; broadcast if size 1
    std::vector<double> volatility;  // per sqrt(unit time), entries >= 0
    double jump_rate = 0.0;          // Poisson intensity per unit time
    double jump_mean = 0.0;          // jump-size mean (binary: centre)
    double jump_scale = 0.0;         // jump-size std dev (binary: half-gap)

    double drift_at(std::size_t i) const;
    double vol_at(std::size_t i) const;
    void validate() const;  // rejects non-finite or negative-scale parameters
};

struct DrivingPath {
    TimeGrid grid;
    std::size_t dimension = 1;
    std::vector<double> values;  // (n_steps+1) x dimension, row-major

    double at(std::size_t k, std::size_t coord = 0) const {
        return values[k * dimension + coord];
    }
};

struct PricePath {
    TimeGrid grid;
    std::vector<double> s;  // n_steps+1 entries, s[k] = S(t_k)
};

enum class PriceMapKind {
    identity,
    affine_of_first_coordinate,      // s = base + scale * y
    exponential_of_first_coordinate  // s = base * exp(scale * y), base > 0
};

struct PriceMapSpec {
    PriceMapKind kind = PriceMapKind::identity;
    double base = 1.0;
    double scale = 1.0;

    double apply(double y) const;
    void validate() const;
};

enum class BenchmarkKind {
    zero,
    constant,                 // coefficient
    terminal_price_multiple,  // coefficient * S(1)
    path_average_multiple     // coefficient * left-endpoint time average of S
};

struct BenchmarkSpec {
    BenchmarkKind kind = BenchmarkKind::zero;
    double coefficient = 0.0;

    void validate() const;
};

// Increments over each cell are drawn independently with the law implied by
// spec over dt = 1/n_steps; identical (spec, grid, seed) triples reproduce
// bit-identical paths. Y(0) = 0.
DrivingPath sample_driving_path(const ProcessSpec& spec, const TimeGrid& grid,
                                std::uint64_t seed);

PricePath price_from_driving(const DrivingPath& path, const PriceMapSpec& map);

double benchmark_from_driving(const DrivingPath& path, const PriceMapSpec& map,
                              const BenchmarkSpec& bench);

std::string to_string(ProcessKind k);
std::string to_string(PriceMapKind k);
std::string to_string(BenchmarkKind k);

} // namespace illiq
