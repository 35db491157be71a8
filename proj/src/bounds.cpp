#include "mbexit/bounds.hpp"

#include <cmath>

#include "mbexit/errors.hpp"

namespace mbexit {

BoundEvaluation exit_lower_bound(const Boundary& b, double T, double c1, double c2) {
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw DomainError("bound constants c1, c2 must be > 0");
    const auto integrals = bound_integrals(b, T);
    BoundEvaluation e;
    e.T = T;
    e.base_probability = p_const_exact(b.value(0.0), T);
    e.half_int_fprime_sq = 0.5 * integrals.fprime_sq;
    e.int_fpp_sqrt = integrals.fpp_sqrt;
    e.sqrtT_fprimeT = integrals.sqrtT_fprimeT;
    e.c1 = c1;
    e.c2 = c2;
    e.exponent = e.half_int_fprime_sq + c1 * e.int_fpp_sqrt + c2 * e.sqrtT_fprimeT;
    e.lower_bound = e.base_probability * std::exp(-e.exponent);
    e.quadrature_error = integrals.abs_error;
    return e;
}

bool is_decreasing_convex(const Boundary& b, double T, int samples) {
    for (int k = 0; k < samples; ++k) {
        const double t = samples > 1 ? T * static_cast<double>(k) / (samples - 1) : 0.0;
        if (b.first(t) > 0.0 || b.second(t) < 0.0) return false;
    }
    return true;
}

BoundVerification verify_bound(const Boundary& b, double T, const SimConfig& cfg, double c1,
                               double c2) {
    if (!is_decreasing_convex(b, T)) {
        throw HypothesisError("bound verification needs f' <= 0 and f'' >= 0 on [0, T]");
    }
    SimConfig c = cfg;
    c.T = T;
    BoundVerification v;
    v.bound = exit_lower_bound(b, T, c1, c2);
    v.estimate = estimate_exit_direct(b, c);
    v.margin = v.estimate.p_hat + 3.0 * v.estimate.std_err - v.bound.lower_bound;
    v.holds = v.margin >= 0.0;
    return v;
}

RateFit fit_rate_exponent(std::span<const RatePoint> points) {
    if (points.size() < 3) throw ConfigError("rate fit needs at least 3 points");
    bool weighted = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].p_hat > 0.0)) throw ConfigError("rate fit needs p_hat > 0");
        if (!(points[i].T > 0.0)) throw ConfigError("rate fit needs T > 0");
        if (i > 0 && !(points[i].T > points[i - 1].T)) {
            throw ConfigError("rate fit horizons must strictly increase");
        }
        if (!(points[i].std_err > 0.0)) weighted = false;
    }

    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (const auto& p : points) {
        const double rel = p.std_err / p.p_hat;
        const double w = weighted ? 1.0 / (rel * rel) : 1.0;
        sw += w;
        sx += w * std::log(p.T);
        sy += w * std::log(p.p_hat);
    }
    const double x_bar = sx / sw;
    const double y_bar = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        const double rel = p.std_err / p.p_hat;
        const double w = weighted ? 1.0 / (rel * rel) : 1.0;
        const double dx = std::log(p.T) - x_bar;
        sxx += w * dx * dx;
        sxy += w * dx * (std::log(p.p_hat) - y_bar);
    }

    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = y_bar - fit.slope * x_bar;
    double slope_var = 1.0 / sxx;
    if (!weighted) {
        double rss = 0.0;
        for (const auto& p : points) {
            const double r = std::log(p.p_hat) - fit.intercept - fit.slope * std::log(p.T);
            rss += r * r;
        }
        slope_var = rss / static_cast<double>(points.size() - 2) / sxx;
    }
    fit.slope_halfwidth = 1.96 * std::sqrt(slope_var);
    fit.points.assign(points.begin(), points.end());
    fit.covers_two_decades =
        points.size() >= 4 && points.back().T >= 100.0 * points.front().T * (1.0 - 1e-12);
    return fit;
}

std::vector<double> log_spaced(double a, double b, int n) {
    if (!(a > 0.0) || !(b >= a) || n < 1) throw ConfigError("log grid needs 0 < a <= b, n >= 1");
    if (n == 1) return {a};
    std::vector<double> out(static_cast<std::size_t>(n));
    const double la = std::log10(a);
    const double lb = std::log10(b);
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = std::pow(10.0, la + (lb - la) * i / (n - 1));
    }
    out.front() = a;
    out.back() = b;
    return out;
}

RateFit rate_sweep(const Boundary& b, const SimConfig& cfg, std::span<const double> T_grid,
                   double dt) {
    std::vector<RatePoint> points;
    for (double T : T_grid) {
        SimConfig c = cfg;
        c.T = T;
        if (dt > 0.0) c.n_steps = static_cast<std::uint64_t>(std::ceil(T / dt - 1e-9));
        const auto e = estimate_exit_direct(b, c);
        points.push_back({T, e.p_hat, e.std_err});
    }
    return fit_rate_exponent(points);
}

SlepianReport slepian_check(const Boundary& b, double t0, double T, const SimConfig& cfg) {
    SimConfig c = cfg;
    c.T = T;
    SlepianReport r;
    r.windows = window_survival(b, t0, c);
    const auto& w = r.windows;
    r.product = w.head * w.tail;
    r.margin = w.full - r.product;
    const double a = w.tail * w.head_std_err;
    const double d = w.head * w.tail_std_err;
    r.margin_std_err = std::sqrt(w.full_std_err * w.full_std_err + a * a + d * d);
    r.holds = r.margin >= -3.0 * r.margin_std_err;
    return r;
}

}  // namespace mbexit
