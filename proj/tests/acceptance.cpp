// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mbexit/boundary.hpp"
#include "mbexit/bounds.hpp"
#include "mbexit/cli.hpp"
#include "mbexit/exact.hpp"
#include "mbexit/integral_test.hpp"
#include "mbexit/simulate.hpp"

using namespace mbexit;
using nlohmann::json;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

struct Timed {
    json report;
    double seconds;
};

Timed run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const auto start = std::chrono::steady_clock::now();
    const int code = cli::run(args, out, err);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (code != 0) throw std::runtime_error("cli exited with " + std::to_string(code) + ": " + err.str());
    return {json::parse(out.str()), seconds};
}

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

SimConfig config(double T, std::uint64_t paths, std::uint64_t steps) {
    SimConfig cfg;
    cfg.T = T;
    cfg.n_paths = paths;
    cfg.n_steps = steps;
    return cfg;
}

void criterion1() {
    const auto r = run_cli({"estimate", "--boundary", "1", "--T", "1", "--paths", "1e6",
                            "--steps", "1000"});
    const auto& e = r.report["outputs"]["estimates"][0];
    const double p = e["p_hat"], se = e["std_err"];
    const bool ok = std::fabs(p - 0.6826895) <= 3 * se && r.seconds < 30.0;
    report(1, ok, fmt("p_hat=%.6f std_err=%.2e target=0.6826895 runtime=%.1fs", p, se, r.seconds));
}

// Rate sweeps use a fixed step of 0.01 so that every horizon is resolved alike.
Timed rate(const char* boundary) {
    return run_cli({"rate", "--boundary", boundary, "--t-grid", "1e2:1e4:5", "--paths", "1e6",
                    "--dt", "0.01"});
}

void criterion2() {
    const auto r = rate("1 - ln(1+t)");
    const double slope = r.report["outputs"]["slope"];
    const double hw = r.report["outputs"]["slope_halfwidth"];
    const bool ok = std::fabs(slope + 0.5) <= 0.05 && r.seconds < 600.0;
    report(2, ok, fmt("slope=%.4f +/- %.4f (target -0.5 +/- 0.05) runtime=%.1fs", slope, hw,
                      r.seconds));
}

void criterion3() {
    const auto r = rate("1 - 0.5*(1+t)^0.5");
    const double slope = r.report["outputs"]["slope"];
    const double hw = r.report["outputs"]["slope_halfwidth"];
    report(3, slope < -0.6, fmt("slope=%.4f +/- %.4f (target < -0.6) runtime=%.1fs", slope, hw,
                                r.seconds));
}

void criterion4() {
    const auto cfg = config(1.0, 1000000, 1000);
    const auto e = verify_bound(Boundary::parse("1 + exp(-1*t)"), 10.0, cfg);
    const auto l = verify_bound(Boundary::parse("1 - ln(1+t)"), 100.0, cfg);
    report(4, e.holds && l.holds,
           fmt("exp: p_hat=%.5f lb=%.5f margin=%.5f; log: p_hat=%.5f lb=%.5f margin=%.5f",
               e.estimate.p_hat, e.bound.lower_bound, e.margin, l.estimate.p_hat,
               l.bound.lower_bound, l.margin));
}

void criterion5() {
    const std::vector<double> grid{1.0, 10.0, 100.0};
    const auto scan = minimal_c_scan(1.0, grid, 50);
    const auto m = bessel_mean(1.0, config(1.0, 1000000, 1));
    const bool ok = scan.c <= 1.6 && std::fabs(m.mean - 1.59577) <= 3 * m.std_err;
    report(5, ok, fmt("scan c=%.6f (u=%.4g, T=%g); bessel_mean(1)=%.5f std_err=%.1e", scan.c,
                      scan.u_at_sup, scan.T_at_sup, m.mean, m.std_err));
}

void criterion6() {
    const auto b = Boundary::parse("1 - ln(1+t)");
    const auto cfg = config(100.0, 1000000, 1000);
    const auto d = estimate_exit_direct(b, cfg);
    const auto g = estimate_exit_girsanov(b, cfg);
    const double diff = std::fabs(d.p_hat - g.p_hat);
    const double tol = 3 * combined(d.std_err, g.std_err);
    bool identical = true;
    for (const char* level : {"1", "2", "0.5"}) {
        const auto c = Boundary::parse(level);
        const auto cc = config(10.0, 200000, 1000);
        const auto cd = estimate_exit_direct(c, cc);
        const auto cg = estimate_exit_girsanov(c, cc);
        identical = identical && cd.p_hat == cg.p_hat && cd.std_err == cg.std_err;
    }
    report(6, diff <= tol && identical,
           fmt("direct=%.6f girsanov=%.6f |diff|=%.2e tol=%.2e; constants bit-exact: %s",
               d.p_hat, g.p_hat, diff, tol, identical ? "yes" : "no"));
}

void criterion7() {
    const double T = 1e6;
    const double scaled = std::sqrt(T) * p_const_exact(1.0, T);
    const double rel = std::fabs(scaled / kSqrt2OverPi - 1.0);
    const auto nov = estimate_novikov_limit(Boundary::parse("1 + exp(-1*t)"),
                                            config(1e3, 1000000, 10000), std::vector<double>{1e3});
    const double diff = std::fabs(nov.lhs - nov.rhs);
    const double tol = 3 * combined(nov.lhs_std_err, nov.rhs_std_err);
    report(7, rel < 1e-3 && diff <= tol,
           fmt("sqrt(T)p=%.6f rel.err=%.1e; lhs=%.5f rhs=%.5f |diff|=%.4f tol=%.4f censored=%.3f",
               scaled, rel, nov.lhs, nov.rhs, diff, tol, nov.censored_fraction));
}

void criterion8() {
    const auto cfg = config(1.0, 1000000, 1000);
    const auto e = slepian_check(Boundary::parse("1 + exp(-1*t)"), 1.0, 10.0, cfg);
    const auto l = slepian_check(Boundary::parse("1 - ln(1+t)"), 10.0, 100.0, cfg);
    report(8, e.holds && l.holds,
           fmt("exp: margin=%.5f (3 sigma %.5f); log: margin=%.5f (3 sigma %.5f)", e.margin,
               3 * e.margin_std_err, l.margin, 3 * l.margin_std_err));
}

Boundary random_boundary(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> coef(-2.0, 2.0), expo(-2.0, 2.0), rate(0.05, 3.0);
    std::vector<BoundaryTerm> terms{{TermKind::constant, 0.0, 0.0},
                                    {TermKind::power, coef(gen), expo(gen)},
                                    {TermKind::logarithmic, coef(gen), 0.0},
                                    {TermKind::exponential, coef(gen), rate(gen)}};
    double f0 = 0.0;
    for (const auto& t : terms) f0 += t.eval(0.0, 0);
    terms[0].coefficient = std::fabs(f0) + 0.5 - f0;
    return Boundary(terms);
}

void criterion9() {
    std::vector<std::string> failed;

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> when(1e-3, 50.0);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto b = random_boundary(gen);
        for (int k = 0; k < 20; ++k) {
            const double t = when(gen), h = 1e-5;
            for (int order = 1; order <= 2; ++order) {
                const double fd = (b.eval(t + h, order - 1) - b.eval(t - h, order - 1)) / (2 * h);
                const double exact = b.eval(t, order);
                worst = std::max(worst, std::fabs(fd - exact) / (1.0 + std::fabs(exact)));
            }
        }
    }
    if (worst > 1e-6) failed.push_back("derivatives");

    const auto quarter = integral_test([](double t) { return std::pow(t, 0.25); }, 1e-10);
    const auto div = integral_test(Boundary::parse("1 + (1+t)^0.5"), 1e-10);
    if (quarter.verdict != Verdict::convergent || std::fabs(quarter.value - 4.0) > 1e-9 ||
        div.verdict != Verdict::divergent) {
        failed.push_back("integral test");
    }

    const std::pair<const char*, const char*> pairs[] = {{"1 - ln(1+t)", "1.2 - ln(1+t)"},
                                                         {"1", "1 + exp(-1*t)"},
                                                         {"1 - 0.5*(1+t)^0.5", "1"}};
    for (const auto& [lo, hi] : pairs) {
        const auto cfg = config(30.0, 50000, 300);
        const auto tf = sample_tau(Boundary::parse(lo), cfg);
        const auto tg = sample_tau(Boundary::parse(hi), cfg);
        for (std::size_t p = 0; p < tf.size(); ++p) {
            if (tf[p].censored && !tg[p].censored) {
                failed.push_back("common random numbers");
                break;
            }
        }
    }

    const auto b = Boundary::parse("1 - ln(1+t)");
    const auto cfg = config(100.0, 50000, 1000);
    set_num_threads(1);
    const auto d1 = estimate_exit_direct(b, cfg);
    const auto g1 = estimate_exit_girsanov(b, cfg);
    for (int threads : {2, 4}) {
        set_num_threads(threads);
        const auto d = estimate_exit_direct(b, cfg);
        const auto g = estimate_exit_girsanov(b, cfg);
        if (d.p_hat != d1.p_hat || d.std_err != d1.std_err || g.p_hat != g1.p_hat ||
            g.std_err != g1.std_err) {
            failed.push_back("thread determinism");
            break;
        }
    }
    set_num_threads(1);

    double fit_err = 0.0;
    for (double k : {-2.0, -1.0, -0.5, -0.25}) {
        std::vector<RatePoint> pts;
        for (double T : log_spaced(1e2, 1e4, 5)) {
            const double p = 0.3 * std::pow(T, k);
            pts.push_back({T, p, 0.01 * p});
        }
        fit_err = std::max(fit_err, std::fabs(fit_rate_exponent(pts).slope - k));
    }
    if (fit_err >= 1e-10) failed.push_back("power-law fit");

    std::string detail = fmt("fd err=%.1e, quarter-power integral=%.12f, fit err=%.1e", worst,
                             quarter.value, fit_err);
    for (const auto& f : failed) detail += "; failed: " + f;
    report(9, failed.empty(), detail);
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{criterion1, criterion2, criterion3,
                                                      criterion4, criterion5, criterion6,
                                                      criterion7, criterion8, criterion9};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), false, std::string("exception: ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
