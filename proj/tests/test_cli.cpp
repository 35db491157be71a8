#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "mbexit/cli.hpp"

using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = mbexit::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);) rows.push_back(split_csv_line(line));
    return rows;
}

}  // namespace

TEST_CASE("classify reports a verdict and the bound integrals") {
    const auto r = run({"classify", "--boundary", "1 - ln(1+t)"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["schema"] == "mbexit.report/1");
    CHECK(j["version"] == mbexit::cli::kVersion);
    CHECK(j["command"] == "classify");
    CHECK(j["inputs"]["boundary"] == "1 - ln(1+t)");
    CHECK(j["inputs"]["T"] == 100.0);
    const auto& o = j["outputs"];
    CHECK(o["verdict"] == "convergent");
    CHECK(std::fabs(o["value"].get<double>() - 2.6856303413007806) <=
          o["tolerance_used"].get<double>());
    CHECK(o["integrals"]["int_fprime_sq"].get<double>() ==
          doctest::Approx(1.0 - 1.0 / 101.0).epsilon(1e-10));
    CHECK(o["integrals"].contains("quadrature_error"));
}

TEST_CASE("domain and usage errors exit with code 2") {
    const auto bad = run({"classify", "--boundary", "0 - ln(1+t)"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("f(0) > 0") != std::string::npos);
    CHECK(bad.out.empty());

    const auto syntax = run({"classify", "--boundary", "1 + foo"});
    CHECK(syntax.code == 2);
    CHECK(syntax.err.find("position 4") != std::string::npos);

    const auto unknown = run({"estimate", "--boundary", "1", "--bogus", "3"});
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("--bogus") != std::string::npos);
    CHECK(unknown.err.find("--paths") != std::string::npos);

    CHECK(run({}).code == 2);
    CHECK(run({"estimate"}).code == 2);
    CHECK(run({"estimate", "--boundary", "1", "--paths", "2.5"}).code == 2);
    CHECK(run({"estimate", "--boundary", "1", "--method", "other"}).code == 2);
    CHECK(run({"rate", "--boundary", "1", "--t-grid", "1:10"}).code == 2);
    CHECK(run({"exact", "--a", "-1"}).code == 2);
    CHECK(run({"--format", "xml", "exact"}).code == 2);
    CHECK(run({"bessel", "--s", "0"}).code == 2);
}

TEST_CASE("hypothesis failures exit with code 1") {
    const auto r = run({"bound", "--boundary", "1 + (1+t)^0.25", "--T", "10", "--verify",
                        "--paths", "1000"});
    CHECK(r.code == 1);
    CHECK(run({"bound", "--boundary", "1 + (1+t)^0.25", "--T", "10"}).code == 0);
}

TEST_CASE("csv and json carry the same numbers") {
    const std::vector<std::vector<std::string>> commands{
        {"estimate", "--boundary", "1 - ln(1+t)", "--T", "10", "--paths", "2000", "--steps",
         "100", "--method", "both"},
        {"exact", "--a", "1", "--T", "3"},
        {"bessel", "--s", "2", "--paths", "1000"},
        {"rate", "--boundary", "1", "--t-grid", "1:100:3", "--paths", "3000", "--steps", "50"},
    };
    for (const auto& cmd : commands) {
        CAPTURE(cmd[0]);
        const auto as_json = run(cmd);
        auto csv_cmd = cmd;
        csv_cmd.insert(csv_cmd.begin(), {"--format", "csv"});
        const auto as_csv = run(csv_cmd);
        REQUIRE(as_json.code == 0);
        REQUIRE(as_csv.code == 0);
        const auto j = json::parse(as_json.out)["outputs"];
        const auto rows = parse_csv(as_csv.out);
        REQUIRE(rows.size() >= 2);
        const auto& header = rows[0];
        // Every CSV number must appear verbatim among the JSON numbers.
        std::vector<double> json_numbers;
        const std::function<void(const json&)> collect = [&](const json& v) {
            if (v.is_number()) json_numbers.push_back(v.get<double>());
            if (v.is_structured()) for (const auto& x : v) collect(x);
        };
        collect(json::parse(as_json.out));
        for (std::size_t r = 1; r < rows.size(); ++r) {
            REQUIRE(rows[r].size() == header.size());
            for (const auto& cell : rows[r]) {
                if (cell.empty() || !(std::isdigit(static_cast<unsigned char>(cell[0])) ||
                                      cell[0] == '-')) {
                    continue;
                }
                const double x = std::strtod(cell.c_str(), nullptr);
                CHECK(std::find(json_numbers.begin(), json_numbers.end(), x) !=
                      json_numbers.end());
            }
        }
    }
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
    const std::vector<std::string> base{"estimate", "--boundary", "1 - ln(1+t)", "--T", "50",
                                        "--paths", "20000", "--steps", "500", "--method",
                                        "both"};
    const auto first = run(base);
    REQUIRE(first.code == 0);
    CHECK(run(base).out == first.out);
    for (const char* threads : {"1", "2", "4"}) {
        auto cmd = base;
        cmd.insert(cmd.begin(), {"--threads", threads});
        CHECK(run(cmd).out == first.out);
    }
    const std::vector<std::string> nov{"novikov", "--boundary", "1 + exp(-1*t)", "--t-grid",
                                       "10:100:2", "--paths", "5000", "--steps", "200"};
    const auto n1 = run(nov);
    auto nov4 = nov;
    nov4.insert(nov4.begin(), {"--threads", "4"});
    CHECK(run(nov4).out == n1.out);
}

TEST_CASE("inputs echo the seed and rerunning them reproduces the outputs") {
    const auto r = run({"slepian", "--boundary", "1", "--T", "10", "--paths", "5000",
                        "--steps", "100", "--seed", "11"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    const auto& in = j["inputs"];
    CHECK(in["seed"] == 11);
    CHECK(in["t0"] == 1.0);
    const auto again = run({"slepian", "--boundary", in["boundary"].get<std::string>(), "--T",
                            std::to_string(in["T"].get<double>()), "--t0",
                            std::to_string(in["t0"].get<double>()), "--paths",
                            std::to_string(in["paths"].get<int>()), "--steps",
                            std::to_string(in["steps"].get<int>()), "--seed",
                            std::to_string(in["seed"].get<int>())});
    CHECK(json::parse(again.out)["outputs"] == j["outputs"]);
}

TEST_CASE("timing is opt-in") {
    const auto plain = run({"exact"});
    CHECK_FALSE(json::parse(plain.out).contains("runtime_ms"));
    const auto timed = run({"--timing", "exact"});
    CHECK(json::parse(timed.out).contains("runtime_ms"));
    CHECK(timed.err.find("ms") != std::string::npos);
}

TEST_CASE("every subcommand runs") {
    CHECK(run({"mean", "--u", "1", "--T", "1"}).code == 0);
    const auto scan = run({"mean", "--scan", "1,10,100", "--u-per-t", "50"});
    REQUIRE(scan.code == 0);
    CHECK(json::parse(scan.out)["outputs"]["c"].get<double>() <= 1.6);
    CHECK(run({"bound", "--boundary", "1 + exp(-1*t)", "--T", "10"}).code == 0);
    CHECK(run({"novikov", "--boundary", "1", "--t-grid", "10:100:2", "--paths", "2000",
               "--steps", "100"})
              .code == 0);
    CHECK(run({"--version"}).code == 0);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("rate sweep on the constant boundary recovers the square-root law") {
    const auto r = run({"rate", "--boundary", "1", "--t-grid", "1e2:1e4:5", "--paths", "1e6",
                        "--seed", "7"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out)["outputs"];
    CHECK(j["slope"].get<double>() >= -0.51);
    CHECK(j["slope"].get<double>() <= -0.49);
    CHECK(j["points"].size() == 5);
    CHECK(j["covers_two_decades"] == true);
}
