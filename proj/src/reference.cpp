#include "mbexit/reference.hpp"

#include <algorithm>
#include <cmath>

#include "mbexit/detail/path_math.hpp"
#include "mbexit/errors.hpp"
#include "mbexit/integral_test.hpp"
#include "mbexit/philox.hpp"

namespace mbexit::reference {
namespace {

using detail::Grid;
using detail::Moments;

std::vector<double> full_path(const PathRng& rng, const Grid& grid) {
    std::vector<double> x(grid.n + 1, 0.0);
    for (std::uint64_t i = 0; i < grid.n; ++i) {
        const double z = rng.normals(Stream::increments, static_cast<std::uint32_t>(i >> 1))[i & 1];
        x[i + 1] = x[i] + grid.sqrt_dt * z;
    }
    return x;
}

bool bridge_crosses(const PathRng& rng, std::uint64_t step, double g0, double g1,
                    const Grid& grid) {
    const double u = rng.uniforms(Stream::bridge, static_cast<std::uint32_t>(step >> 1))[step & 1];
    return u < std::exp(-detail::crossing_exponent(g0, g1, grid.inv_dt));
}

// First failing step of the path, or n when it survives.
std::uint64_t first_failure(const PathRng& rng, const std::vector<double>& x,
                            const std::vector<double>& level, const Grid& grid, bool bridge,
                            bool& at_point) {
    for (std::uint64_t i = 0; i < grid.n; ++i) {
        const double g0 = level[i] - x[i];
        const double g1 = level[i + 1] - x[i + 1];
        if (g1 < 0.0) {
            at_point = true;
            return i;
        }
        if (bridge && bridge_crosses(rng, i, g0, g1, grid)) {
            at_point = false;
            return i;
        }
    }
    return grid.n;
}

}  // namespace

ExitEstimate estimate_exit_direct(const Boundary& b, const SimConfig& cfg) {
    cfg.validate();
    const Grid grid(cfg);
    const auto level = detail::sample_on_grid(b, grid, 0);
    std::vector<Moments> chunks(detail::chunk_count(cfg));
    for (std::uint64_t p = 0; p < cfg.n_paths; ++p) {
        const PathRng rng(cfg.seed, p);
        const auto x = full_path(rng, grid);
        bool at_point = false;
        if (first_failure(rng, x, level, grid, cfg.bridge_correction, at_point) == grid.n) {
            auto& m = chunks[p / cfg.chunk_size];
            m.sum += 1.0;
            m.sum_sq += 1.0;
        }
    }
    return detail::finish_estimate(chunks, cfg.n_paths, Estimator::direct);
}

ExitEstimate estimate_exit_girsanov(const Boundary& b, const SimConfig& cfg) {
    cfg.validate();
    const Grid grid(cfg);
    const std::vector<double> level(grid.n + 1, b.value(0.0));
    const auto curvature = detail::sample_on_grid(b, grid, 2);
    const double slope_T = b.first(grid.T);
    const double half_energy = 0.5 * bound_integrals(b, grid.T).fprime_sq;
    std::vector<Moments> chunks(detail::chunk_count(cfg));
    for (std::uint64_t p = 0; p < cfg.n_paths; ++p) {
        const PathRng rng(cfg.seed, p);
        const auto x = full_path(rng, grid);
        bool at_point = false;
        if (first_failure(rng, x, level, grid, cfg.bridge_correction, at_point) != grid.n) {
            continue;
        }
        double interior = 0.0;
        for (std::uint64_t i = 1; i < grid.n; ++i) interior += x[i] * curvature[i];
        const double x_T = x[grid.n];
        const double log_w =
            -slope_T * x_T + grid.dt * (interior + 0.5 * x_T * curvature[grid.n]) - half_energy;
        const double w = std::exp(log_w);
        auto& m = chunks[p / cfg.chunk_size];
        m.sum += w;
        m.sum_sq += w * w;
    }
    return detail::finish_estimate(chunks, cfg.n_paths, Estimator::girsanov);
}

std::vector<TauSample> sample_tau(const Boundary& b, const SimConfig& cfg) {
    cfg.validate();
    const Grid grid(cfg);
    const auto level = detail::sample_on_grid(b, grid, 0);
    std::vector<TauSample> out;
    out.reserve(cfg.n_paths);
    for (std::uint64_t p = 0; p < cfg.n_paths; ++p) {
        const PathRng rng(cfg.seed, p);
        const auto x = full_path(rng, grid);
        bool at_point = false;
        const auto i = first_failure(rng, x, level, grid, cfg.bridge_correction, at_point);
        if (i == grid.n) {
            out.push_back({grid.T, level[grid.n], true});
            continue;
        }
        const double g0 = level[i] - x[i];
        const double g1 = level[i + 1] - x[i + 1];
        double tau = at_point ? grid.time(i) + grid.dt * (g0 / (g0 - g1))
                              : grid.time(i) + 0.5 * grid.dt;
        tau = std::min(tau, grid.T);
        out.push_back({tau, b.value(tau), false});
    }
    return out;
}

WindowSurvival window_survival(const Boundary& b, double t0, const SimConfig& cfg) {
    cfg.validate();
    if (!(t0 > 0.0) || !(t0 < cfg.T)) throw DomainError("window split needs 0 < t0 < T");
    const Grid grid(cfg);
    const auto split = detail::split_index(grid, t0);
    const auto level = detail::sample_on_grid(b, grid, 0);
    std::uint64_t full = 0, head_count = 0, tail_count = 0;
    for (std::uint64_t p = 0; p < cfg.n_paths; ++p) {
        const PathRng rng(cfg.seed, p);
        const auto x = full_path(rng, grid);
        // A step is lost when its endpoint is above f or, both endpoints being
        // below, its bridge touches f.
        const auto step_ok = [&](std::uint64_t i) {
            const double g0 = level[i] - x[i];
            const double g1 = level[i + 1] - x[i + 1];
            if (g1 < 0.0) return false;
            if (!cfg.bridge_correction || g0 < 0.0) return true;
            return !bridge_crosses(rng, i, g0, g1, grid);
        };
        bool head = true;
        for (std::uint64_t i = 0; i < split; ++i) head = head && step_ok(i);
        bool tail = level[split] - x[split] >= 0.0;
        for (std::uint64_t i = split; i < grid.n; ++i) tail = tail && step_ok(i);
        full += head && tail;
        head_count += head;
        tail_count += tail;
    }
    return detail::window_estimate(grid, split, cfg.n_paths, full, head_count, tail_count);
}

MeanEstimate bessel_mean(double s, const SimConfig& cfg) {
    cfg.validate();
    const double scale = std::sqrt(s);
    std::vector<Moments> chunks(detail::chunk_count(cfg));
    for (std::uint64_t p = 0; p < cfg.n_paths; ++p) {
        const PathRng rng(cfg.seed, p);
        const auto z01 = rng.normals(Stream::bessel, 0);
        const auto z23 = rng.normals(Stream::bessel, 1);
        const double r = scale * std::sqrt(z01[0] * z01[0] + z01[1] * z01[1] + z23[0] * z23[0]);
        auto& m = chunks[p / cfg.chunk_size];
        m.sum += r;
        m.sum_sq += r * r;
    }
    const auto e = detail::finish_estimate(chunks, cfg.n_paths, Estimator::direct);
    return {e.p_hat, e.std_err, cfg.n_paths};
}

}  // namespace mbexit::reference
