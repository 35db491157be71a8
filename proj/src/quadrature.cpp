#include "mbexit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "mbexit/errors.hpp"

namespace mbexit {
namespace {

// 15-point Kronrod abscissae (positive half) and weights; the odd-indexed
// abscissae are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891715};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel kronrod15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double gauss = fc * kWg[3];
    double kronrod = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    return {a, b, kronrod * half, std::fabs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol, int max_panels) {
    const std::array<double, 2> ends{a, b};
    return integrate(f, ends, abs_tol, rel_tol, max_panels);
}

QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const double> breakpoints, double abs_tol, double rel_tol,
                           int max_panels) {
    if (breakpoints.size() < 2) throw ConfigError("integrate needs at least two breakpoints");
    std::priority_queue<Panel> panels;
    double value = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i] < breakpoints[i + 1])) continue;
        Panel p = kronrod15(f, breakpoints[i], breakpoints[i + 1]);
        value += p.value;
        error += p.error;
        panels.push(p);
    }
    QuadratureResult result;
    while (!panels.empty()) {
        if (error <= std::max(abs_tol, rel_tol * std::fabs(value))) {
            result.converged = true;
            break;
        }
        if (static_cast<int>(panels.size()) >= max_panels) break;
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) break;  // panel below machine resolution
        panels.pop();
        const Panel left = kronrod15(f, worst.a, mid);
        const Panel right = kronrod15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    if (panels.empty()) result.converged = true;
    // Re-sum from scratch to shed the drift of the running totals.
    result.value = 0.0;
    result.abs_error = 0.0;
    result.panels = static_cast<int>(panels.size());
    std::vector<Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
    for (const auto& p : all) {
        result.value += p.value;
        result.abs_error += p.error;
    }
    if (!result.converged) {
        result.converged = result.abs_error <= std::max(abs_tol, rel_tol * std::fabs(result.value));
    }
    return result;
}

}  // namespace mbexit
