#include "mbexit/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mbexit/errors.hpp"
#include "mbexit/quadrature.hpp"

namespace mbexit {

double p_const_exact(double a, double T) {
    if (!(a > 0.0)) throw DomainError("p_const_exact needs a > 0");
    if (!(T >= 0.0)) throw DomainError("p_const_exact needs T >= 0");
    if (T == 0.0) return 1.0;
    return std::erf(a / std::sqrt(2.0 * T));
}

ConditionedMeanReport conditioned_mean(double u, double T, double a) {
    if (!(a > 0.0)) throw DomainError("conditioned_mean needs a > 0");
    if (!(u > 0.0) || !(u <= T)) throw DomainError("conditioned_mean needs 0 < u <= T");

    const double s = T - u;
    const double inv_2u = 0.5 / u;
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * u);
    // B_u density restricted to paths whose running maximum stays below a.
    const auto killed_density = [=](double x) {
        const double y = 2.0 * a - x;
        return norm * (std::exp(-x * x * inv_2u) - std::exp(-y * y * inv_2u));
    };
    const double inv_sqrt_2s = s > 0.0 ? 1.0 / std::sqrt(2.0 * s) : 0.0;
    const auto stay_below = [=](double x) {
        return s > 0.0 ? std::erf((a - x) * inv_sqrt_2s) : 1.0;
    };

    const double lower = -12.0 * std::sqrt(T);
    std::vector<double> points{lower, a};
    for (double p : {-12.0 * std::sqrt(u), -std::sqrt(u), 0.0, std::sqrt(u), 12.0 * std::sqrt(u),
                     std::min(0.0, a - std::sqrt(u)),
                     a - 12.0 * std::sqrt(s), a - std::sqrt(s)}) {
        if (p > lower && p < a) points.push_back(p);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    constexpr double kRelTol = 1e-10;
    constexpr double kAbsTol = 1e-300;
    const auto mass = integrate([&](double x) { return killed_density(x) * stay_below(x); },
                                points, kAbsTol, kRelTol, 20000);
    // The first moment can vanish (vacuous conditioning), so its absolute
    // tolerance is scaled to the mass and the sqrt(u) spread of B_u.
    const auto first_moment =
        integrate([&](double x) { return x * killed_density(x) * stay_below(x); }, points,
                  1e-12 * std::sqrt(u) * mass.value, kRelTol, 20000);

    ConditionedMeanReport report;
    report.u = u;
    report.T = T;
    report.a = a;
    report.mean = first_moment.value / mass.value;
    report.abs_error = (first_moment.abs_error + std::fabs(report.mean) * mass.abs_error) /
                       mass.value;
    report.minimal_c_observed = std::max(0.0, -report.mean / std::sqrt(u));
    return report;
}

RepulsionScan minimal_c_scan(double a, std::span<const double> T_grid, int u_per_T) {
    if (u_per_T < 2) throw DomainError("minimal_c_scan needs at least two u points per horizon");
    if (T_grid.empty()) throw DomainError("minimal_c_scan needs a non-empty horizon grid");
    RepulsionScan scan;
    for (double T : T_grid) {
        if (!(T > 0.0)) throw DomainError("minimal_c_scan horizons must be > 0");
        for (int i = 0; i < u_per_T; ++i) {
            // u = T * 10^{-3 (1 - i/(n-1))}; the last point is exactly T.
            const double frac = static_cast<double>(i) / (u_per_T - 1);
            const double u = i + 1 == u_per_T ? T : T * std::pow(10.0, -3.0 * (1.0 - frac));
            const auto r = conditioned_mean(u, T, a);
            if (scan.u_at_sup == 0.0 || r.minimal_c_observed > scan.c) {
                scan.c = r.minimal_c_observed;
                scan.u_at_sup = u;
                scan.T_at_sup = T;
            }
        }
    }
    return scan;
}

}  // namespace mbexit
