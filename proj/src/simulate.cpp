#include "mbexit/simulate.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "mbexit/detail/path_math.hpp"
#include "mbexit/errors.hpp"
#include "mbexit/exact.hpp"
#include "mbexit/integral_test.hpp"
#include "mbexit/philox.hpp"

namespace mbexit {

void SimConfig::validate() const {
    if (n_paths < 1) throw ConfigError("n_paths must be >= 1");
    if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
    if (chunk_size < 1) throw ConfigError("chunk_size must be >= 1");
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be a finite value > 0");
    if (n_steps / 2 >= std::numeric_limits<std::uint32_t>::max()) {
        throw ConfigError("n_steps exceeds the generator's block counter");
    }
}

std::string_view to_string(Estimator e) {
    return e == Estimator::direct ? "direct" : "girsanov";
}

void set_num_threads(int n) {
    if (n >= 1) omp_set_num_threads(n);
}

int num_threads() { return omp_get_max_threads(); }

namespace {

using detail::Grid;
using detail::Moments;

// Lazily drawn step variates of one path; blocks hold two steps each.
class StepVariates {
public:
    StepVariates(std::uint64_t seed, std::uint64_t path) : rng_(seed, path) {}

    double normal(std::uint64_t step) {
        const auto block = static_cast<std::uint32_t>(step >> 1);
        if (block != normal_block_) {
            normals_ = rng_.normals(Stream::increments, block);
            normal_block_ = block;
        }
        return normals_[step & 1];
    }

    // True when the bridge over this step touches the boundary.
    bool bridge_crosses(std::uint64_t step, double g0, double g1, double inv_dt) {
        const double exponent = detail::crossing_exponent(g0, g1, inv_dt);
        if (exponent >= detail::kNoCrossingExponent) return false;
        const auto block = static_cast<std::uint32_t>(step >> 1);
        if (block != uniform_block_) {
            uniforms_ = rng_.uniforms(Stream::bridge, block);
            uniform_block_ = block;
        }
        return uniforms_[step & 1] < std::exp(-exponent);
    }

private:
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    PathRng rng_;
    std::uint32_t normal_block_ = kNone;
    std::uint32_t uniform_block_ = kNone;
    std::array<double, 2> normals_{};
    std::array<double, 2> uniforms_{};
};

// Runs body(chunk, first_path, end_path) over all chunks of cfg in parallel.
template <class Body>
void for_each_chunk(const SimConfig& cfg, Body&& body) {
    const auto chunks = static_cast<std::int64_t>(detail::chunk_count(cfg));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < chunks; ++c) {
        const auto first = static_cast<std::uint64_t>(c) * cfg.chunk_size;
        const auto end = std::min(cfg.n_paths, first + cfg.chunk_size);
        body(static_cast<std::size_t>(c), first, end);
    }
}

// Survival of one path below the grid values `level`. on_step(i, x) sees
// every surviving grid point i = 1..n.
template <class OnStep>
bool survives(StepVariates& v, const Grid& grid, const double* level, bool bridge,
              OnStep&& on_step) {
    double x = 0.0;
    double gap = level[0];
    for (std::uint64_t i = 0; i < grid.n; ++i) {
        const double x1 = x + grid.sqrt_dt * v.normal(i);
        const double gap1 = level[i + 1] - x1;
        if (gap1 < 0.0) return false;
        if (bridge && v.bridge_crosses(i, gap, gap1, grid.inv_dt)) return false;
        x = x1;
        gap = gap1;
        on_step(i + 1, x);
    }
    return true;
}

void require_positive_start(const Boundary& b) {
    if (!(b.value(0.0) > 0.0)) throw DomainError("boundary must satisfy f(0) > 0");
}

}  // namespace

ExitEstimate estimate_exit_direct(const Boundary& b, const SimConfig& cfg) {
    cfg.validate();
    require_positive_start(b);
    const Grid grid(cfg);
    const auto level = detail::sample_on_grid(b, grid, 0);
    std::vector<Moments> chunks(detail::chunk_count(cfg));
    for_each_chunk(cfg, [&](std::size_t c, std::uint64_t first, std::uint64_t end) {
        Moments m;
        for (std::uint64_t p = first; p < end; ++p) {
            StepVariates v(cfg.seed, p);
            if (survives(v, grid, level.data(), cfg.bridge_correction, [](auto, double) {})) {
                m.sum += 1.0;
                m.sum_sq += 1.0;
            }
        }
        chunks[c] = m;
    });
    return detail::finish_estimate(chunks, cfg.n_paths, Estimator::direct);
}

ExitEstimate estimate_exit_girsanov(const Boundary& b, const SimConfig& cfg) {
    cfg.validate();
    require_positive_start(b);
    const Grid grid(cfg);
    const std::vector<double> level(grid.n + 1, b.value(0.0));
    const auto curvature = detail::sample_on_grid(b, grid, 2);
    const double slope_T = b.first(grid.T);
    const double half_energy = 0.5 * bound_integrals(b, grid.T).fprime_sq;
    const std::uint64_t n = grid.n;

    std::vector<Moments> chunks(detail::chunk_count(cfg));
    for_each_chunk(cfg, [&](std::size_t c, std::uint64_t first, std::uint64_t end) {
        Moments m;
        for (std::uint64_t p = first; p < end; ++p) {
            StepVariates v(cfg.seed, p);
            double interior = 0.0;
            double x_T = 0.0;
            const bool alive = survives(v, grid, level.data(), cfg.bridge_correction,
                                        [&](std::uint64_t i, double x) {
                                            if (i < n) interior += x * curvature[i];
                                            else x_T = x;
                                        });
            if (!alive) continue;
            const double log_w = -slope_T * x_T +
                                 grid.dt * (interior + 0.5 * x_T * curvature[n]) - half_energy;
            const double w = std::exp(log_w);
            m.sum += w;
            m.sum_sq += w * w;
        }
        chunks[c] = m;
    });
    return detail::finish_estimate(chunks, cfg.n_paths, Estimator::girsanov);
}

std::vector<TauSample> sample_tau(const Boundary& b, const SimConfig& cfg) {
    cfg.validate();
    require_positive_start(b);
    const Grid grid(cfg);
    const auto level = detail::sample_on_grid(b, grid, 0);
    std::vector<TauSample> out(cfg.n_paths);
    for_each_chunk(cfg, [&](std::size_t, std::uint64_t first, std::uint64_t end) {
        for (std::uint64_t p = first; p < end; ++p) {
            StepVariates v(cfg.seed, p);
            TauSample s{grid.T, level[grid.n], true};
            double x = 0.0;
            double gap = level[0];
            for (std::uint64_t i = 0; i < grid.n; ++i) {
                const double x1 = x + grid.sqrt_dt * v.normal(i);
                const double gap1 = level[i + 1] - x1;
                double tau = -1.0;
                if (gap1 < 0.0) {
                    tau = grid.time(i) + grid.dt * (gap / (gap - gap1));
                } else if (cfg.bridge_correction &&
                           v.bridge_crosses(i, gap, gap1, grid.inv_dt)) {
                    tau = grid.time(i) + 0.5 * grid.dt;
                }
                if (tau >= 0.0) {
                    tau = std::min(tau, grid.T);
                    s = {tau, b.value(tau), false};
                    break;
                }
                x = x1;
                gap = gap1;
            }
            out[p] = s;
        }
    });
    return out;
}

NovikovEstimate estimate_novikov_limit(const Boundary& b, const SimConfig& cfg,
                                       std::span<const double> T_grid) {
    if (T_grid.empty()) throw ConfigError("novikov needs at least one horizon");
    NovikovEstimate est;
    est.integral_test_passed = integral_test(b, 1e-10).verdict == Verdict::convergent;
    double T_max = 0.0;
    for (double T : T_grid) {
        SimConfig c = cfg;
        c.T = T;
        const auto e = estimate_exit_direct(b, c);
        const double scale = std::sqrt(T);
        est.by_horizon.push_back({T, scale * e.p_hat, scale * e.std_err});
        if (T >= T_max) {
            T_max = T;
            est.lhs = scale * e.p_hat;
            est.lhs_std_err = scale * e.std_err;
        }
    }
    SimConfig c = cfg;
    c.T = T_max;
    const auto taus = sample_tau(b, c);
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t censored = 0;
    for (const auto& s : taus) {
        sum += s.f_at_tau;
        sum_sq += s.f_at_tau * s.f_at_tau;
        censored += s.censored ? 1 : 0;
    }
    const double n = static_cast<double>(taus.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    est.rhs = kSqrt2OverPi * mean;
    est.rhs_std_err = kSqrt2OverPi * std::sqrt(var / n);
    est.censored_fraction = static_cast<double>(censored) / n;
    est.censoring_flag = est.censored_fraction > 0.01;
    return est;
}

MeanEstimate bessel_mean(double s, const SimConfig& cfg) {
    if (!(s > 0.0)) throw DomainError("bessel_mean needs s > 0");
    cfg.validate();
    const double scale = std::sqrt(s);
    std::vector<Moments> chunks(detail::chunk_count(cfg));
    for_each_chunk(cfg, [&](std::size_t c, std::uint64_t first, std::uint64_t end) {
        Moments m;
        for (std::uint64_t p = first; p < end; ++p) {
            const PathRng rng(cfg.seed, p);
            const auto z01 = rng.normals(Stream::bessel, 0);
            const auto z23 = rng.normals(Stream::bessel, 1);
            const double r =
                scale * std::sqrt(z01[0] * z01[0] + z01[1] * z01[1] + z23[0] * z23[0]);
            m.sum += r;
            m.sum_sq += r * r;
        }
        chunks[c] = m;
    });
    const auto e = detail::finish_estimate(chunks, cfg.n_paths, Estimator::direct);
    return {e.p_hat, e.std_err, cfg.n_paths};
}

WindowSurvival window_survival(const Boundary& b, double t0, const SimConfig& cfg) {
    cfg.validate();
    require_positive_start(b);
    if (!(t0 > 0.0) || !(t0 < cfg.T)) throw DomainError("window split needs 0 < t0 < T");
    const Grid grid(cfg);
    const auto split = detail::split_index(grid, t0);
    const auto level = detail::sample_on_grid(b, grid, 0);

    struct Counts {
        std::uint64_t full = 0, head = 0, tail = 0;
    };
    std::vector<Counts> chunks(detail::chunk_count(cfg));
    for_each_chunk(cfg, [&](std::size_t c, std::uint64_t first, std::uint64_t end) {
        Counts k;
        for (std::uint64_t p = first; p < end; ++p) {
            StepVariates v(cfg.seed, p);
            bool head = true;
            bool tail = true;
            double x = 0.0;
            double gap = level[0];
            for (std::uint64_t i = 0; i < grid.n && tail; ++i) {
                const double x1 = x + grid.sqrt_dt * v.normal(i);
                const double gap1 = level[i + 1] - x1;
                const bool point_fails = gap1 < 0.0;
                if (point_fails) {
                    if (i + 1 <= split) head = false;
                    if (i + 1 >= split) tail = false;
                } else if (cfg.bridge_correction && !(gap < 0.0) &&
                           v.bridge_crosses(i, gap, gap1, grid.inv_dt)) {
                    (i < split ? head : tail) = false;
                }
                x = x1;
                gap = gap1;
            }
            k.full += head && tail;
            k.head += head;
            k.tail += tail;
        }
        chunks[c] = k;
    });
    Counts total;
    for (const auto& k : chunks) {
        total.full += k.full;
        total.head += k.head;
        total.tail += k.tail;
    }
    return detail::window_estimate(grid, split, cfg.n_paths, total.full, total.head,
                                   total.tail);
}

}  // namespace mbexit
