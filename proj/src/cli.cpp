#include "mbexit/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "mbexit/boundary.hpp"
#include "mbexit/bounds.hpp"
#include "mbexit/errors.hpp"
#include "mbexit/exact.hpp"
#include "mbexit/integral_test.hpp"
#include "mbexit/simulate.hpp"

namespace mbexit::cli {
namespace {

using nlohmann::ordered_json;

// A failed check after a complete run: the report is still printed.
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Options {
    std::string format = "json";
    int threads = 0;
    bool timing = false;

    std::string boundary;
    double T = 100.0;
    double tolerance = 1e-10;

    double paths = 1e5;
    double steps = 1e3;
    std::uint64_t seed = 42;
    double chunk = 4096;
    bool no_bridge = false;

    double a = 1.0;
    double u = 0.0;
    std::vector<double> scan;
    int u_per_T = 50;

    std::string method = "direct";
    double c1 = kBesselConstant;
    double c2 = kBesselConstant;
    bool verify = false;
    std::string t_grid;
    double dt = 0.0;
    double t0 = 0.0;
    double s = 1.0;
};

// Rows of the CSV rendering; cells come from the same JSON values as the report.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<ordered_json>> rows;
};

struct Outcome {
    ordered_json inputs;
    ordered_json outputs;
    Table table;
    int code = 0;
};

std::uint64_t as_count(double value, const char* flag) {
    if (!(value >= 1.0) || value != std::floor(value) || value > 9.0e18) {
        throw UsageError(std::string(flag) + " must be a positive integer, got " +
                         std::to_string(value));
    }
    return static_cast<std::uint64_t>(value);
}

SimConfig sim_config(const Options& o) {
    SimConfig cfg;
    cfg.n_paths = as_count(o.paths, "--paths");
    cfg.n_steps = as_count(o.steps, "--steps");
    cfg.chunk_size = as_count(o.chunk, "--chunk");
    cfg.seed = o.seed;
    cfg.T = o.T;
    cfg.bridge_correction = !o.no_bridge;
    return cfg;
}

ordered_json sim_inputs(const SimConfig& cfg) {
    return {{"paths", cfg.n_paths},
            {"steps", cfg.n_steps},
            {"seed", cfg.seed},
            {"chunk", cfg.chunk_size},
            {"bridge_correction", cfg.bridge_correction}};
}

Boundary boundary_of(const Options& o) {
    if (o.boundary.empty()) throw UsageError("--boundary is required");
    return Boundary::parse(o.boundary);
}

// "a:b:n" -> n log-spaced horizons from a to b.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw UsageError("--t-grid must have the form a:b:n, got '" + text + "'");
    try {
        const double a = std::stod(parts[0]);
        const double b = std::stod(parts[1]);
        const double n = std::stod(parts[2]);
        if (n != std::floor(n) || n < 1) throw UsageError("--t-grid count must be an integer >= 1");
        return log_spaced(a, b, static_cast<int>(n));
    } catch (const std::logic_error& e) {
        throw UsageError("--t-grid '" + text + "': " + e.what());
    }
}

ordered_json estimate_json(const ExitEstimate& e) {
    ordered_json j{{"estimator", to_string(e.estimator)},
                   {"p_hat", e.p_hat},
                   {"std_err", e.std_err},
                   {"n_paths", e.n_paths}};
    j["effective_sample_size"] =
        e.effective_sample_size ? ordered_json(*e.effective_sample_size) : ordered_json(nullptr);
    return j;
}

Outcome do_classify(const Options& o) {
    const auto b = boundary_of(o);
    if (!(o.T > 0.0)) throw UsageError("--T must be > 0");
    const auto report = integral_test(b, o.tolerance);
    const auto integrals = bound_integrals(b, o.T);
    Outcome r;
    r.inputs = {{"boundary", o.boundary}, {"tolerance", o.tolerance}, {"T", o.T}};
    ordered_json partials = ordered_json::array();
    for (const auto& [upper, value] : report.partial_values) partials.push_back({upper, value});
    r.outputs = {{"canonical", b.render()},
                 {"verdict", to_string(report.verdict)},
                 {"value", report.value},
                 {"tolerance_used", report.tolerance_used},
                 {"partial_values", partials},
                 {"integrals",
                  {{"T", o.T},
                   {"int_fprime_sq", integrals.fprime_sq},
                   {"int_fpp_sqrt", integrals.fpp_sqrt},
                   {"sqrtT_fprimeT", integrals.sqrtT_fprimeT},
                   {"quadrature_error", integrals.abs_error}}}};
    r.table.header = {"verdict", "value", "tolerance_used", "T", "int_fprime_sq",
                      "int_fpp_sqrt", "sqrtT_fprimeT", "quadrature_error"};
    const auto& in = r.outputs["integrals"];
    r.table.rows.push_back({r.outputs["verdict"], r.outputs["value"], r.outputs["tolerance_used"],
                            in["T"], in["int_fprime_sq"], in["int_fpp_sqrt"], in["sqrtT_fprimeT"],
                            in["quadrature_error"]});
    return r;
}

Outcome do_exact(const Options& o) {
    Outcome r;
    r.inputs = {{"a", o.a}, {"T", o.T}};
    const double p = p_const_exact(o.a, o.T);
    // erf is accurate to a few ulp.
    r.outputs = {{"p", p}, {"abs_error", 4.0 * std::numeric_limits<double>::epsilon() * p}};
    r.table.header = {"a", "T", "p", "abs_error"};
    r.table.rows.push_back({o.a, o.T, r.outputs["p"], r.outputs["abs_error"]});
    return r;
}

Outcome do_mean(const Options& o) {
    Outcome r;
    if (o.scan.empty()) {
        if (!(o.u > 0.0)) throw UsageError("--u must be > 0 (or pass --scan)");
        const auto m = conditioned_mean(o.u, o.T, o.a);
        r.inputs = {{"a", o.a}, {"u", o.u}, {"T", o.T}};
        r.outputs = {{"mean", m.mean},
                     {"abs_error", m.abs_error},
                     {"minimal_c_observed", m.minimal_c_observed},
                     {"tolerance", 1e-10}};
        r.table.header = {"a", "u", "T", "mean", "abs_error", "minimal_c_observed"};
        r.table.rows.push_back({o.a, o.u, o.T, r.outputs["mean"], r.outputs["abs_error"],
                                r.outputs["minimal_c_observed"]});
        return r;
    }
    const auto scan = minimal_c_scan(o.a, o.scan, o.u_per_T);
    r.inputs = {{"a", o.a}, {"scan", o.scan}, {"u_per_T", o.u_per_T}};
    r.outputs = {{"c", scan.c},
                 {"u_at_sup", scan.u_at_sup},
                 {"T_at_sup", scan.T_at_sup},
                 {"bessel_constant", kBesselConstant},
                 {"tolerance", 1e-10}};
    r.table.header = {"a", "u_per_T", "c", "u_at_sup", "T_at_sup", "bessel_constant", "tolerance"};
    r.table.rows.push_back({o.a, o.u_per_T, r.outputs["c"], r.outputs["u_at_sup"],
                            r.outputs["T_at_sup"], r.outputs["bessel_constant"],
                            r.outputs["tolerance"]});
    return r;
}

Outcome do_estimate(const Options& o) {
    const auto b = boundary_of(o);
    const auto cfg = sim_config(o);
    if (o.method != "direct" && o.method != "girsanov" && o.method != "both") {
        throw UsageError("--method must be direct, girsanov or both");
    }
    Outcome r;
    r.inputs = {{"boundary", o.boundary}, {"T", o.T}, {"method", o.method}};
    r.inputs.update(sim_inputs(cfg));
    std::vector<ExitEstimate> estimates;
    if (o.method != "girsanov") estimates.push_back(estimate_exit_direct(b, cfg));
    if (o.method != "direct") estimates.push_back(estimate_exit_girsanov(b, cfg));
    ordered_json list = ordered_json::array();
    r.table.header = {"estimator", "T", "n_paths", "n_steps", "p_hat", "std_err",
                      "effective_sample_size"};
    for (const auto& e : estimates) {
        list.push_back(estimate_json(e));
        const auto& j = list.back();
        r.table.rows.push_back({j["estimator"], o.T, cfg.n_paths, cfg.n_steps, j["p_hat"],
                                j["std_err"], j["effective_sample_size"]});
    }
    r.outputs = {{"estimates", list}};
    if (b.is_constant()) r.outputs["exact"] = p_const_exact(b.value(0.0), o.T);
    return r;
}

Outcome do_bound(const Options& o) {
    const auto b = boundary_of(o);
    Outcome r;
    r.inputs = {{"boundary", o.boundary}, {"T", o.T}, {"c1", o.c1}, {"c2", o.c2},
                {"verify", o.verify}};
    BoundEvaluation e;
    ordered_json verification = nullptr;
    if (o.verify) {
        const auto cfg = sim_config(o);
        r.inputs.update(sim_inputs(cfg));
        const auto v = verify_bound(b, o.T, cfg, o.c1, o.c2);
        e = v.bound;
        verification = {{"p_hat", v.estimate.p_hat},
                        {"std_err", v.estimate.std_err},
                        {"margin", v.margin},
                        {"holds", v.holds}};
        if (!v.holds) r.code = kCheckFailed;
    } else {
        e = exit_lower_bound(b, o.T, o.c1, o.c2);
    }
    r.outputs = {{"T", e.T},
                 {"base_probability", e.base_probability},
                 {"half_int_fprime_sq", e.half_int_fprime_sq},
                 {"int_fpp_sqrt", e.int_fpp_sqrt},
                 {"sqrtT_fprimeT", e.sqrtT_fprimeT},
                 {"c1", e.c1},
                 {"c2", e.c2},
                 {"exponent", e.exponent},
                 {"lower_bound", e.lower_bound},
                 {"quadrature_error", e.quadrature_error},
                 {"verification", verification}};
    r.table.header = {"T", "base_probability", "half_int_fprime_sq", "int_fpp_sqrt",
                      "sqrtT_fprimeT", "c1", "c2", "lower_bound", "quadrature_error",
                      "p_hat", "std_err", "margin", "holds"};
    std::vector<ordered_json> row;
    for (std::size_t i = 0; i < 9; ++i) row.push_back(r.outputs[r.table.header[i]]);
    for (const char* key : {"p_hat", "std_err", "margin", "holds"}) {
        row.push_back(verification.is_null() ? ordered_json(nullptr) : verification[key]);
    }
    r.table.rows.push_back(std::move(row));
    return r;
}

Outcome do_rate(const Options& o) {
    const auto b = boundary_of(o);
    auto cfg = sim_config(o);
    const auto grid = parse_grid(o.t_grid);
    const auto fit = rate_sweep(b, cfg, grid, o.dt);
    Outcome r;
    r.inputs = {{"boundary", o.boundary}, {"t_grid", o.t_grid}, {"dt", o.dt}};
    r.inputs.update(sim_inputs(cfg));
    ordered_json points = ordered_json::array();
    for (const auto& p : fit.points) {
        points.push_back({{"T", p.T}, {"p_hat", p.p_hat}, {"std_err", p.std_err}});
    }
    r.outputs = {{"slope", fit.slope},
                 {"slope_halfwidth", fit.slope_halfwidth},
                 {"intercept", fit.intercept},
                 {"covers_two_decades", fit.covers_two_decades},
                 {"points", points}};
    r.table.header = {"T", "p_hat", "std_err", "slope", "slope_halfwidth", "intercept"};
    for (const auto& p : r.outputs["points"]) {
        r.table.rows.push_back({p["T"], p["p_hat"], p["std_err"], r.outputs["slope"],
                                r.outputs["slope_halfwidth"], r.outputs["intercept"]});
    }
    return r;
}

Outcome do_novikov(const Options& o) {
    const auto b = boundary_of(o);
    const auto cfg = sim_config(o);
    const auto grid = parse_grid(o.t_grid);
    const auto est = estimate_novikov_limit(b, cfg, grid);
    Outcome r;
    r.inputs = {{"boundary", o.boundary}, {"t_grid", o.t_grid}};
    r.inputs.update(sim_inputs(cfg));
    ordered_json by = ordered_json::array();
    for (const auto& p : est.by_horizon) {
        by.push_back({{"T", p.T}, {"lhs", p.lhs}, {"std_err", p.std_err}});
    }
    r.outputs = {{"lhs", est.lhs},
                 {"lhs_std_err", est.lhs_std_err},
                 {"rhs", est.rhs},
                 {"rhs_std_err", est.rhs_std_err},
                 {"censored_fraction", est.censored_fraction},
                 {"censoring_flag", est.censoring_flag},
                 {"integral_test_passed", est.integral_test_passed},
                 {"by_horizon", by}};
    r.table.header = {"T", "lhs", "lhs_std_err", "rhs", "rhs_std_err", "censored_fraction"};
    for (const auto& p : r.outputs["by_horizon"]) {
        r.table.rows.push_back({p["T"], p["lhs"], p["std_err"], r.outputs["rhs"],
                                r.outputs["rhs_std_err"], r.outputs["censored_fraction"]});
    }
    return r;
}

Outcome do_slepian(const Options& o) {
    const auto b = boundary_of(o);
    const auto cfg = sim_config(o);
    const double t0 = o.t0 > 0.0 ? o.t0 : o.T / 10.0;
    const auto rep = slepian_check(b, t0, o.T, cfg);
    Outcome r;
    r.inputs = {{"boundary", o.boundary}, {"t0", t0}, {"T", o.T}};
    r.inputs.update(sim_inputs(cfg));
    const auto& w = rep.windows;
    r.outputs = {{"t0_grid", w.t0},
                 {"full", w.full},
                 {"full_std_err", w.full_std_err},
                 {"head", w.head},
                 {"head_std_err", w.head_std_err},
                 {"tail", w.tail},
                 {"tail_std_err", w.tail_std_err},
                 {"product", rep.product},
                 {"margin", rep.margin},
                 {"margin_std_err", rep.margin_std_err},
                 {"holds", rep.holds}};
    for (auto it = r.outputs.begin(); it != r.outputs.end(); ++it) r.table.header.push_back(it.key());
    std::vector<ordered_json> row;
    for (auto it = r.outputs.begin(); it != r.outputs.end(); ++it) row.push_back(it.value());
    r.table.rows.push_back(std::move(row));
    if (!rep.holds) r.code = kCheckFailed;
    return r;
}

Outcome do_bessel(const Options& o) {
    const auto cfg = sim_config(o);
    const auto m = bessel_mean(o.s, cfg);
    Outcome r;
    r.inputs = {{"s", o.s}, {"paths", cfg.n_paths}, {"seed", cfg.seed}, {"chunk", cfg.chunk_size}};
    r.outputs = {{"mean", m.mean},
                 {"std_err", m.std_err},
                 {"expected", kBesselConstant * std::sqrt(o.s)}};
    r.table.header = {"s", "n", "mean", "std_err", "expected"};
    r.table.rows.push_back({o.s, m.n, r.outputs["mean"], r.outputs["std_err"],
                            r.outputs["expected"]});
    return r;
}

std::string csv_cell(const ordered_json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) {
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v.get<double>());
        return std::string(buf, end);
    }
    return v.dump();
}

void write_csv(const Table& table, std::ostream& out) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out << (i ? "," : "") << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
}

void apply_thread_override(int flag) {
    if (flag > 0) {
        set_num_threads(flag);
        return;
    }
    if (const char* env = std::getenv("MBEXIT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) set_num_threads(n);
    }
}

void add_sim_options(CLI::App* sub, Options& o) {
    sub->add_option("--paths", o.paths, "Monte Carlo paths")->capture_default_str();
    sub->add_option("--steps", o.steps, "time steps per path")->capture_default_str();
    sub->add_option("--seed", o.seed, "generator seed")->capture_default_str();
    sub->add_option("--chunk", o.chunk, "paths per work unit")->capture_default_str();
    sub->add_flag("--no-bridge", o.no_bridge, "disable the bridge crossing correction");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Exit probabilities of Brownian motion below a moving boundary", "mbexit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--format", o.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--threads", o.threads, "worker threads (overrides MBEXIT_THREADS)");
    app.add_flag("--timing", o.timing, "add runtime_ms to JSON reports");

    const auto boundary_opt = [&](CLI::App* sub) {
        sub->add_option("--boundary", o.boundary, "boundary expression, e.g. \"1 - ln(1+t)\"")
            ->required();
    };
    const auto horizon_opt = [&](CLI::App* sub) {
        sub->add_option("--T", o.T, "horizon")->capture_default_str();
    };

    auto* classify = app.add_subcommand("classify", "integral test and bound integrals");
    boundary_opt(classify);
    horizon_opt(classify);
    classify->add_option("--tolerance", o.tolerance, "integral test tolerance")
        ->capture_default_str();

    auto* exact = app.add_subcommand("exact", "P(sup B <= a) on [0, T]");
    exact->add_option("--a", o.a, "level")->capture_default_str();
    horizon_opt(exact);

    auto* mean = app.add_subcommand("mean", "E[B_u | sup B <= a] or the repulsion constant scan");
    mean->add_option("--a", o.a, "level")->capture_default_str();
    mean->add_option("--u", o.u, "time of the conditioned mean");
    horizon_opt(mean);
    mean->add_option("--scan", o.scan, "horizons to scan, comma separated")->delimiter(',');
    mean->add_option("--u-per-t", o.u_per_T, "u points per horizon")->capture_default_str();

    auto* estimate = app.add_subcommand("estimate", "Monte Carlo exit probability");
    boundary_opt(estimate);
    horizon_opt(estimate);
    estimate->add_option("--method", o.method, "direct, girsanov or both")->capture_default_str();
    add_sim_options(estimate, o);

    auto* bound = app.add_subcommand("bound", "explicit lower bound, optionally verified");
    boundary_opt(bound);
    horizon_opt(bound);
    bound->add_option("--c1", o.c1, "curvature constant")->capture_default_str();
    bound->add_option("--c2", o.c2, "endpoint constant")->capture_default_str();
    bound->add_flag("--verify", o.verify, "compare with a Monte Carlo estimate");
    add_sim_options(bound, o);

    auto* rate = app.add_subcommand("rate", "decay exponent over a horizon sweep");
    boundary_opt(rate);
    rate->add_option("--t-grid", o.t_grid, "a:b:n log-spaced horizons")->required();
    rate->add_option("--dt", o.dt, "fixed step size; overrides --steps per horizon");
    add_sim_options(rate, o);

    auto* novikov = app.add_subcommand("novikov", "limit of sqrt(T) P against E f(tau)");
    boundary_opt(novikov);
    novikov->add_option("--t-grid", o.t_grid, "a:b:n log-spaced horizons")->required();
    add_sim_options(novikov, o);

    auto* slepian = app.add_subcommand("slepian", "window product inequality");
    boundary_opt(slepian);
    horizon_opt(slepian);
    slepian->add_option("--t0", o.t0, "window split (default T/10)");
    add_sim_options(slepian, o);

    auto* bessel = app.add_subcommand("bessel", "mean modulus of 3-d Brownian motion");
    bessel->add_option("--s", o.s, "time")->capture_default_str();
    add_sim_options(bessel, o);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    apply_thread_override(o.threads);

    const auto started = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        if (command == "classify") outcome = do_classify(o);
        else if (command == "exact") outcome = do_exact(o);
        else if (command == "mean") outcome = do_mean(o);
        else if (command == "estimate") outcome = do_estimate(o);
        else if (command == "bound") outcome = do_bound(o);
        else if (command == "rate") outcome = do_rate(o);
        else if (command == "novikov") outcome = do_novikov(o);
        else if (command == "slepian") outcome = do_slepian(o);
        else outcome = do_bessel(o);
    } catch (const HypothesisError& e) {
        err << "hypothesis failure: " << e.what() << '\n';
        return kCheckFailed;
    } catch (const SyntaxError& e) {
        err << "error: --boundary: " << e.what() << '\n' << sub->help();
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n' << sub->help();
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n' << sub->help();
        return kUsage;
    }
    const auto elapsed = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - started)
                             .count();

    if (o.format == "csv") {
        write_csv(outcome.table, out);
    } else {
        ordered_json report{{"schema", kSchema},
                            {"version", kVersion},
                            {"command", command},
                            {"inputs", outcome.inputs},
                            {"outputs", outcome.outputs}};
        if (o.timing) report["runtime_ms"] = elapsed;
        out << report.dump(2) << '\n';
    }
    if (o.timing) err << command << ": " << elapsed << " ms\n";
    return outcome.code;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace mbexit::cli
