#pragma once

#include <span>
#include <vector>

#include "mbexit/boundary.hpp"
#include "mbexit/exact.hpp"
#include "mbexit/integral_test.hpp"
#include "mbexit/simulate.hpp"

namespace mbexit {

// Lower bound
//   P(B_t <= f(t), t <= T) >= P(sup_{t<=T} B_t <= f(0))
//       * exp(-1/2 int f'^2 - c1 int |f''| sqrt(s) ds - c2 sqrt(T) |f'(T)|).
struct BoundEvaluation {
    double T = 0.0;
    double base_probability = 0.0;
    double half_int_fprime_sq = 0.0;
    double int_fpp_sqrt = 0.0;
    double sqrtT_fprimeT = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double exponent = 0.0;  // the (nonnegative) argument of exp(-...)
    double lower_bound = 0.0;
    double quadrature_error = 0.0;
};

// Default constants: the Bessel(3) repulsion constant for both.
BoundEvaluation exit_lower_bound(const Boundary& b, double T, double c1 = kBesselConstant,
                               double c2 = kBesselConstant);

struct BoundVerification {
    BoundEvaluation bound;
    ExitEstimate estimate;
    double margin = 0.0;  // p_hat + 3 std_err - lower_bound
    bool holds = false;
};

// f' <= 0 and f'' >= 0 at `samples` equally spaced points of [0, T].
bool is_decreasing_convex(const Boundary& b, double T, int samples = 1000);

// Throws HypothesisError unless is_decreasing_convex(b, T). cfg.T is replaced by T.
BoundVerification verify_bound(const Boundary& b, double T, const SimConfig& cfg,
                               double c1 = kBesselConstant, double c2 = kBesselConstant);

struct RatePoint {
    double T;
    double p_hat;
    double std_err;
};

// Weighted least squares of ln p on ln T.
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_halfwidth = 0.0;  // 95%, normal approximation
    std::vector<RatePoint> points;
    bool covers_two_decades = false;  // >= 4 horizons spanning >= 2 decades
};

// Weights (p / std_err)^2; if any std_err is 0 the fit is unweighted with a
// residual-based half-width. Throws ConfigError for fewer than 3 points,
// non-positive p_hat or horizons that do not strictly increase.
RateFit fit_rate_exponent(std::span<const RatePoint> points);

// Horizons a..b, n of them, log-spaced; the endpoints are exact.
std::vector<double> log_spaced(double a, double b, int n);

// Direct estimates over T_grid then fit_rate_exponent. When dt > 0 each
// horizon uses ceil(T / dt) steps, otherwise cfg.n_steps.
RateFit rate_sweep(const Boundary& b, const SimConfig& cfg, std::span<const double> T_grid,
                   double dt = 0.0);

struct SlepianReport {
    WindowSurvival windows;
    double product = 0.0;  // head * tail
    double margin = 0.0;   // full - product
    double margin_std_err = 0.0;
    bool holds = false;    // margin >= -3 margin_std_err
};

SlepianReport slepian_check(const Boundary& b, double t0, double T, const SimConfig& cfg);

}  // namespace mbexit
