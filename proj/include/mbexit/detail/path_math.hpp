#pragma once

// Arithmetic shared by the parallel kernels and the serial reference. Both
// must evaluate these exact expressions for their results to agree bitwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mbexit/boundary.hpp"
#include "mbexit/errors.hpp"
#include "mbexit/simulate.hpp"

namespace mbexit::detail {

struct Grid {
    std::uint64_t n = 0;
    double T = 0.0;
    double dt = 0.0;
    double sqrt_dt = 0.0;
    double inv_dt = 0.0;

    explicit Grid(const SimConfig& cfg)
        : n(cfg.n_steps),
          T(cfg.T),
          dt(cfg.T / static_cast<double>(cfg.n_steps)),
          sqrt_dt(std::sqrt(dt)),
          inv_dt(static_cast<double>(cfg.n_steps) / cfg.T) {}

    double time(std::uint64_t i) const {
        return i == n ? T : T * static_cast<double>(i) / static_cast<double>(n);
    }
};

inline std::vector<double> sample_on_grid(const Boundary& b, const Grid& grid, int order) {
    std::vector<double> out(grid.n + 1);
    for (std::uint64_t i = 0; i <= grid.n; ++i) out[i] = b.eval(grid.time(i), order);
    return out;
}

// A Brownian bridge over one step with endpoint gaps g0, g1 > 0 below a
// linear boundary touches it with probability exp(-crossing_exponent).
inline double crossing_exponent(double g0, double g1, double inv_dt) {
    return 2.0 * g0 * g1 * inv_dt;
}

// Uniforms are at least 2^-53 and exp(-38) < 2^-53, so from here on the
// bridge never crosses and its uniform need not be drawn.
inline constexpr double kNoCrossingExponent = 38.0;

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
};

// p_hat and its standard error from weight moments over n paths.
inline ExitEstimate finish_estimate(const std::vector<Moments>& chunks, std::uint64_t n,
                                    Estimator estimator) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& c : chunks) {
        sum += c.sum;
        sum_sq += c.sum_sq;
    }
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = std::max(0.0, sum_sq / nn - mean * mean);
    ExitEstimate e;
    e.p_hat = mean;
    e.std_err = std::sqrt(var / nn);
    e.n_paths = n;
    e.estimator = estimator;
    if (estimator == Estimator::girsanov) {
        e.effective_sample_size = sum_sq > 0.0 ? sum * sum / sum_sq : 0.0;
    }
    return e;
}

// Grid index of the window split nearest to t0, kept strictly inside (0, n).
inline std::uint64_t split_index(const Grid& grid, double t0) {
    if (grid.n < 2) throw ConfigError("window split needs n_steps >= 2");
    const double k = std::round(t0 * grid.inv_dt);
    return static_cast<std::uint64_t>(std::clamp(k, 1.0, static_cast<double>(grid.n - 1)));
}

inline WindowSurvival window_estimate(const Grid& grid, std::uint64_t split, std::uint64_t n,
                                      std::uint64_t full, std::uint64_t head,
                                      std::uint64_t tail) {
    const double nn = static_cast<double>(n);
    const auto binomial = [nn](std::uint64_t k, double& p, double& se) {
        p = static_cast<double>(k) / nn;
        se = std::sqrt(p * (1.0 - p) / nn);
    };
    WindowSurvival w;
    w.t0 = grid.time(split);
    binomial(full, w.full, w.full_std_err);
    binomial(head, w.head, w.head_std_err);
    binomial(tail, w.tail, w.tail_std_err);
    return w;
}

inline std::uint64_t chunk_count(const SimConfig& cfg) {
    return (cfg.n_paths + cfg.chunk_size - 1) / cfg.chunk_size;
}

}  // namespace mbexit::detail
