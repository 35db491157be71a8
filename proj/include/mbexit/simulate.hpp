#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mbexit/boundary.hpp"

namespace mbexit {

struct SimConfig {
    std::uint64_t n_paths = 100000;
    std::uint64_t n_steps = 1000;
    double T = 1.0;
    std::uint64_t seed = 42;
    bool bridge_correction = true;
    std::uint64_t chunk_size = 4096;  // paths per work unit

    // Throws ConfigError unless n_paths, n_steps, chunk_size >= 1 and T > 0.
    void validate() const;
};

enum class Estimator { direct, girsanov };

std::string_view to_string(Estimator e);

struct ExitEstimate {
    double p_hat = 0.0;
    double std_err = 0.0;
    std::uint64_t n_paths = 0;
    Estimator estimator = Estimator::direct;
    std::optional<double> effective_sample_size;  // girsanov only
};

struct TauSample {
    double tau = 0.0;  // first passage time, or T when censored
    double f_at_tau = 0.0;
    bool censored = false;
};

struct MeanEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::uint64_t n = 0;
};

struct NovikovEstimate {
    struct Point {
        double T;
        double lhs;  // sqrt(T) * p_hat(T)
        double std_err;
    };
    double lhs = 0.0;  // at the largest horizon
    double lhs_std_err = 0.0;
    double rhs = 0.0;  // sqrt(2/pi) * mean f(tau)
    double rhs_std_err = 0.0;
    double censored_fraction = 0.0;
    bool censoring_flag = false;        // censored fraction above 1%
    bool integral_test_passed = false;  // false means the limit need not exist
    std::vector<Point> by_horizon;
};

// Survival probabilities of one set of paths on [0, T], [0, t0] and [t0, T].
struct WindowSurvival {
    double t0 = 0.0;  // snapped to the simulation grid
    double full = 0.0;
    double full_std_err = 0.0;
    double head = 0.0;
    double head_std_err = 0.0;
    double tail = 0.0;
    double tail_std_err = 0.0;
};

// Euler paths on a uniform grid of cfg.n_steps; a path survives while
// X <= f at the grid points and, with bridge correction, an independent
// uniform exceeds exp(-2 g_i g_{i+1} / dt) on each step (g = f - X).
ExitEstimate estimate_exit_direct(const Boundary& b, const SimConfig& cfg);

// Paths below the constant level f(0), weighted by
// exp(-f'(T) X_T + sum_i X_i f''(t_i) dt - 1/2 int_0^T f'^2) (trapezoidal sum).
ExitEstimate estimate_exit_girsanov(const Boundary& b, const SimConfig& cfg);

// First grid crossing of X over f, refined by linear interpolation of the gap;
// a bridge kill places tau at the middle of its step.
std::vector<TauSample> sample_tau(const Boundary& b, const SimConfig& cfg);

// lhs from estimate_exit_direct at each horizon of T_grid (cfg.T ignored);
// rhs from sample_tau at the largest horizon, censored paths contributing f(T).
NovikovEstimate estimate_novikov_limit(const Boundary& b, const SimConfig& cfg,
                                       std::span<const double> T_grid);

// Mean modulus of 3-dimensional Brownian motion at time s. Only n_paths,
// seed and chunk_size of cfg are used: W_s is sampled exactly.
MeanEstimate bessel_mean(double s, const SimConfig& cfg);

WindowSurvival window_survival(const Boundary& b, double t0, const SimConfig& cfg);

// OpenMP worker count for the kernels; results never depend on it.
void set_num_threads(int n);
int num_threads();

}  // namespace mbexit
