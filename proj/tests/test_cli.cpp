// Process-level checks of the CLI: exit codes, output files, determinism.

#include <catch2/catch.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "maglev/csv.hpp"

#ifndef MAGLEV_CLI_PATH
#define MAGLEV_CLI_PATH "maglev"
#endif
#ifndef MAGLEV_CONFIG_DIR
#define MAGLEV_CONFIG_DIR "configs"
#endif

namespace {

struct RunResult {
    int exit_code;
};

RunResult run(const std::string& args) {
    const std::string cmd =
        std::string(MAGLEV_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string baseline() {
    return std::string(MAGLEV_CONFIG_DIR) + "/baseline.cfg";
}

std::string tmp_path(const std::string& name) {
    return "cli_test_" + name;
}

} // namespace

TEST_CASE("simulate writes the documented trajectory table", "[cli]") {
    const std::string out = tmp_path("simulate.csv");
    const RunResult r = run("simulate " + baseline() +
                            " --set integrate.transient_periods=20"
                            " --set integrate.record_periods=3 --csv " +
                            out);
    REQUIRE(r.exit_code == 0);
    const maglev::RawCsv csv = maglev::parse_csv(slurp(out));
    REQUIRE(csv.columns ==
            std::vector<std::string>{"tau", "Y", "dY", "Q1", "dQ1", "Q2", "dQ2",
                                     "power"});
    REQUIRE(csv.rows.size() == 3 * 200 + 1);
    std::remove(out.c_str());
}

TEST_CASE("identical invocations produce byte-identical CSV", "[cli]") {
    const std::string out1 = tmp_path("det1.csv");
    const std::string out2 = tmp_path("det2.csv");
    const std::string common = "poincare " + baseline() +
                               " --set integrate.transient_periods=50"
                               " --set integrate.record_periods=10 --csv ";
    REQUIRE(run(common + out1).exit_code == 0);
    REQUIRE(run(common + out2).exit_code == 0);
    REQUIRE(slurp(out1) == slurp(out2));
    REQUIRE_FALSE(slurp(out1).empty());
    std::remove(out1.c_str());
    std::remove(out2.c_str());
}

TEST_CASE("freqresp-internal reports the retuned response peak", "[cli]") {
    const std::string out = tmp_path("fri.csv");
    const RunResult r = run("freqresp-internal " + baseline() +
                            " --set model.E=0.3 --set analysis.n_points=41 --csv " +
                            out);
    REQUIRE(r.exit_code == 0);
    const maglev::RawCsv csv = maglev::parse_csv(slurp(out));
    REQUIRE(csv.columns ==
            std::vector<std::string>{"sigma1", "p1", "p2", "p3", "stable"});
    double peak = 0.0;
    for (const auto& row : csv.rows)
        peak = std::max(peak, maglev::parse_double_exact(row[3]));
    REQUIRE(peak > 0.084 * 0.85);
    REQUIRE(peak < 0.084 * 1.15);
    std::remove(out.c_str());
}

TEST_CASE("power-compare reports the regime gap through the CLI", "[cli]") {
    const std::string out = tmp_path("pc.csv");
    const RunResult r = run("power-compare " + baseline() + " --csv " + out);
    REQUIRE(r.exit_code == 0);
    const maglev::RawCsv csv = maglev::parse_csv(slurp(out));
    REQUIRE(csv.rows.size() == 1);
    const double ratio = maglev::parse_double_exact(csv.rows[0][2]);
    REQUIRE(ratio >= 50.0);
    std::remove(out.c_str());
}

TEST_CASE("retune emits a parseable retuned configuration", "[cli]") {
    const std::string out = tmp_path("retuned.cfg");
    const std::string cmd = std::string(MAGLEV_CLI_PATH) + " retune " +
                            baseline() +
                            " --set analysis.target=primary --quiet > " + out +
                            " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const std::string text = slurp(out);
    REQUIRE(text.find("W4 = 12.25") != std::string::npos);
    std::remove(out.c_str());
}

TEST_CASE("bifurcate, chaos-grid, sweep and energy-audit wire through",
          "[cli]") {
    const std::string ref17 = std::string(MAGLEV_CONFIG_DIR) + "/ref17.cfg";

    const std::string bif = tmp_path("bif.csv");
    REQUIRE(run("bifurcate " + ref17 +
                " --set analysis.grid_min=0.5 --set analysis.grid_max=1.0"
                " --set analysis.grid_n=3 --set integrate.transient_periods=100"
                " --set integrate.record_periods=10 --csv " +
                bif)
                .exit_code == 0);
    const maglev::RawCsv bif_csv = maglev::parse_csv(slurp(bif));
    REQUIRE(bif_csv.columns == std::vector<std::string>{"E", "Y"});
    REQUIRE(bif_csv.rows.size() == 30);
    std::remove(bif.c_str());

    const std::string grid = tmp_path("grid.csv");
    REQUIRE(run("chaos-grid " + ref17 +
                " --set analysis.pairs=0:0,0.8:0.6"
                " --set integrate.transient_periods=100"
                " --set integrate.record_periods=20 --csv " +
                grid)
                .exit_code == 0);
    const maglev::RawCsv grid_csv = maglev::parse_csv(slurp(grid));
    REQUIRE(grid_csv.rows.size() == 2);
    std::remove(grid.c_str());

    const std::string sweep = tmp_path("sweep.csv");
    REQUIRE(run("sweep " + baseline() +
                " --set analysis.vary=E --set analysis.values=0.3,1.0"
                " --set analysis.analysis=freq_internal"
                " --set analysis.n_points=21 --csv " +
                sweep)
                .exit_code == 0);
    const maglev::RawCsv sweep_csv = maglev::parse_csv(slurp(sweep));
    REQUIRE(sweep_csv.rows.size() == 2);
    REQUIRE(maglev::parse_double_exact(sweep_csv.rows[1][2]) >
            maglev::parse_double_exact(sweep_csv.rows[0][2]));
    std::remove(sweep.c_str());

    const std::string audit = tmp_path("audit.csv");
    REQUIRE(run("energy-audit " + baseline() + " --csv " + audit).exit_code == 0);
    const maglev::RawCsv audit_csv = maglev::parse_csv(slurp(audit));
    REQUIRE(audit_csv.rows.size() == 1);
    REQUIRE(maglev::parse_double_exact(audit_csv.rows[0][0]) < 1e-4);
    std::remove(audit.c_str());
}

TEST_CASE("the svg flag emits a standalone plot", "[cli]") {
    const std::string csv = tmp_path("svg.csv");
    const std::string svg = tmp_path("plot.svg");
    REQUIRE(run("simulate " + baseline() +
                " --set integrate.transient_periods=10"
                " --set integrate.record_periods=2 --csv " +
                csv + " --svg " + svg)
                .exit_code == 0);
    const std::string text = slurp(svg);
    REQUIRE(text.find("<svg") == 0);
    REQUIRE(text.find("<polyline") != std::string::npos);
    std::remove(csv.c_str());
    std::remove(svg.c_str());
}

TEST_CASE("a missing config file exits with the validation code", "[cli]") {
    REQUIRE(run("simulate does_not_exist.cfg").exit_code == 1);
}

TEST_CASE("a malformed config exits with the validation code", "[cli]") {
    const std::string bad = tmp_path("bad.cfg");
    {
        std::ofstream f(bad);
        f << "[model]\nW2 = 1.5\nbogus_key = 3\n";
    }
    REQUIRE(run("simulate " + bad).exit_code == 1);
    std::remove(bad.c_str());
}

TEST_CASE("numerical divergence exits with its own code", "[cli]") {
    const std::string diverging = tmp_path("diverging.cfg");
    {
        std::ofstream f(diverging);
        f << "[model]\nW2 = 0\nW3 = -0.5\nW4 = 1\nalpha1 = 0\nalpha2 = 0\n"
             "alpha3 = 0\nalpha4 = 0\nalpha5 = 0\nbeta1 = 0\nbeta2 = 0\n"
             "beta3 = 1\nE = 2\nOmega = 1\n"
             "[integrate]\ntransient_periods = 200\ny0 = 2\n";
    }
    REQUIRE(run("simulate " + diverging).exit_code == 2);
    std::remove(diverging.c_str());
}

TEST_CASE("unknown subcommands and flags exit nonzero", "[cli]") {
    REQUIRE(run("frobnicate " + baseline()).exit_code != 0);
    REQUIRE(run("simulate").exit_code != 0);
}
