#pragma once

#include <span>

namespace mbexit {

// sqrt(2/pi); also the leading constant of T^{1/2} P(sup B <= a) / a.
inline constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;
// Mean modulus of a standard 3-dimensional normal vector, 2 sqrt(2/pi).
inline constexpr double kBesselConstant = 2.0 * kSqrt2OverPi;

// P(sup_{t<=T} B_t <= a) = 2 Phi(a / sqrt(T)) - 1, and 1 for T = 0.
// Throws DomainError for a <= 0 or T < 0.
double p_const_exact(double a, double T);

struct ConditionedMeanReport {
    double u = 0.0;
    double T = 0.0;
    double a = 0.0;
    double mean = 0.0;                // E[B_u | sup_{t<=T} B_t <= a]
    double minimal_c_observed = 0.0;  // max(0, -mean / sqrt(u))
    double abs_error = 0.0;           // propagated quadrature error of mean
};

// Markov decomposition at time u: the density of B_u killed at level a times
// the probability that the remaining T - u stays below a, integrated over
// [-12 sqrt(T), a] at tolerance 1e-10. Requires 0 < u <= T and a > 0.
ConditionedMeanReport conditioned_mean(double u, double T, double a);

struct RepulsionScan {
    double c = 0.0;  // sup of -mean / sqrt(u) over the grid
    double u_at_sup = 0.0;
    double T_at_sup = 0.0;
};

// For each horizon T, u runs over u_per_T log-spaced points in [T/1000, T].
RepulsionScan minimal_c_scan(double a, std::span<const double> T_grid, int u_per_T);

}  // namespace mbexit
