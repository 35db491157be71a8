#pragma once

#include <functional>
#include <span>

namespace mbexit {

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;  // Gauss/Kronrod difference summed over panels
    int panels = 0;
    bool converged = false;
};

// Globally adaptive Gauss-Kronrod (7/15) integration over [a, b]. The panel
// with the largest error estimate is bisected until
// error <= max(abs_tol, rel_tol * |value|) or max_panels is reached.
// Deterministic: no randomness, fixed refinement order.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol, int max_panels = 4000);

// Same, but seeded with the panels between consecutive breakpoints (sorted,
// at least two). Use breakpoints to expose features the rule would otherwise miss.
QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const double> breakpoints, double abs_tol, double rel_tol,
                           int max_panels = 4000);

}  // namespace mbexit
