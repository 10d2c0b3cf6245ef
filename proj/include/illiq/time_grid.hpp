#pragma once

#include <cstddef>
#include <stdexcept>

namespace illiq {

// Uniform partition of the trading interval [0,1]; t_k = k/n_steps.
// Every pathwise integral in the toolkit is a left-endpoint Riemann sum on
// this grid, so quantities that compare per-cell (wealth vs. market bound)
// compare exactly, not just in the limit.
class TimeGrid {
public:
    explicit TimeGrid(std::size_t n_steps) : n_steps_(n_steps) {
        if (n_steps < 2)
            throw std::invalid_argument("TimeGrid: n_steps must be at least 2");
    }

    std::size_t n_steps() const { return n_steps_; }
    std::size_t n_points() const { return n_steps_ + 1; }
    double dt() const { return 1.0 / static_cast<double>(n_steps_); }
    double t(std::size_t k) const {
        return static_cast<double>(k) / static_cast<double>(n_steps_);
    }

    bool operator==(const TimeGrid& other) const { return n_steps_ == other.n_steps_; }
    bool operator!=(const TimeGrid& other) const { return !(*this == other); }

private:
    std::size_t n_steps_;
};

} // namespace illiq
