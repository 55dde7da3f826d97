#include <catch2/catch.hpp>

#include <cstdint>
#include <cstring>
#include <random>

#include "maglev/config.hpp"
#include "maglev/csv.hpp"
#include "maglev/svg.hpp"
#include "oracles.hpp"

using namespace maglev;

#ifndef MAGLEV_CONFIG_DIR
#define MAGLEV_CONFIG_DIR "configs"
#endif

namespace {

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

} // namespace

TEST_CASE("the shipped baseline config loads verbatim", "[cli_io]") {
    const RunConfig cfg =
        load_config(std::string(MAGLEV_CONFIG_DIR) + "/baseline.cfg");
    REQUIRE(cfg.model.W2 == 1.5);
    REQUIRE(cfg.model.W3 == 1.0);
    REQUIRE(cfg.model.W4 == 2.2783);
    REQUIRE(cfg.model.alpha1 == 0.3247);
    REQUIRE(cfg.model.alpha5 == 0.84);
    REQUIRE(cfg.model.beta1 == 0.8333);
    REQUIRE(cfg.model.E == 0.7812);
    REQUIRE(cfg.model.Omega == 3.5);
    REQUIRE(cfg.integrate.steps_per_period == 200);
    REQUIRE(cfg.integrate.transient_periods == 400);
    REQUIRE(cfg.integrate.record_periods == 100);

    REQUIRE(cfg.physical.has_value());
    const DimlessParams renorm = normalize(*cfg.physical);
    REQUIRE(renorm.W2 == Approx(cfg.model.W2).epsilon(1e-10));
    REQUIRE(renorm.W4 == Approx(cfg.model.W4).epsilon(1e-10));
    REQUIRE(renorm.alpha1 == Approx(cfg.model.alpha1).epsilon(1e-10));
    REQUIRE(renorm.beta3 == Approx(cfg.model.beta3).epsilon(1e-10));
    REQUIRE(renorm.E == Approx(cfg.model.E).epsilon(1e-10));
    REQUIRE(renorm.Omega == Approx(cfg.model.Omega).epsilon(1e-10));
}

TEST_CASE("the shipped chaos-study config loads verbatim", "[cli_io]") {
    const RunConfig cfg =
        load_config(std::string(MAGLEV_CONFIG_DIR) + "/ref17.cfg");
    REQUIRE(cfg.model.E == 3.07);
    REQUIRE(cfg.model.Omega == 3.1215);
    REQUIRE(cfg.model.W4 == 9.108);
    REQUIRE(cfg.model.alpha1 == 0.64944);
    REQUIRE(cfg.model.alpha2 == 0.0);
    REQUIRE(cfg.analysis.pairs.size() == 4);
    REQUIRE(cfg.analysis.pairs[3] == std::pair{0.8, 0.6});
}

TEST_CASE("an empty config lists every missing required key", "[cli_io]") {
    try {
        parse_config("");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        REQUIRE(what.find("missing required keys") != std::string::npos);
        REQUIRE(what.find("model.W2") != std::string::npos);
        REQUIRE(what.find("model.Omega") != std::string::npos);
        REQUIRE(what.find("model.beta3") != std::string::npos);
    }
}

TEST_CASE("parser reports unknown keys and sections with their line",
          "[cli_io]") {
    try {
        parse_config("[model]\nW2 = 1\nWX = 2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.line() == 3);
        REQUIRE(std::string(e.what()).find("model.WX") != std::string::npos);
    }
    REQUIRE_THROWS_AS(parse_config("[mdoel]\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config("W2 = 1\n"), ConfigError);       // before section
    REQUIRE_THROWS_AS(parse_config("[model]\nW2 = x\n"), ConfigError); // bad number
    REQUIRE_THROWS_AS(parse_config("[model]\nW2 = 1\nW2 = 2\n"), ConfigError);
}

TEST_CASE("parser reports malformed lines with line and column", "[cli_io]") {
    try {
        parse_config("[model]\n  garbage line\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.line() == 2);
        REQUIRE(e.column() == 3);
    }
}

TEST_CASE("defaults are materialized and echoed", "[cli_io]") {
    std::string minimal = "[model]\n";
    DimlessParams base = oracles::baseline_params();
    for (const char* key :
         {"W2", "W3", "W4", "alpha1", "alpha2", "alpha3", "alpha4", "alpha5",
          "beta1", "beta2", "beta3", "E", "Omega"})
        minimal += std::string(key) + " = " + format_double(param_ref(base, key)) + "\n";

    const RunConfig cfg = parse_config(minimal);
    REQUIRE(cfg.integrate.steps_per_period == 200);
    REQUIRE(cfg.integrate.transient_periods == 400);
    REQUIRE(cfg.integrate.record_periods == 100);
    REQUIRE(cfg.analysis.tol == 0.01);
    REQUIRE(cfg.analysis.n_points == 81);
    REQUIRE_FALSE(cfg.physical.has_value());

    const std::string echoed = resolved_text(cfg);
    REQUIRE(echoed.find("steps_per_period = 200") != std::string::npos);
    const RunConfig again = parse_config(echoed);
    REQUIRE(again.model.W4 == cfg.model.W4);
    REQUIRE(again.analysis.n_points == cfg.analysis.n_points);
    REQUIRE(again.integrate.record_periods == cfg.integrate.record_periods);
}

TEST_CASE("overrides re-validate like the parser", "[cli_io]") {
    RunConfig cfg =
        load_config(std::string(MAGLEV_CONFIG_DIR) + "/baseline.cfg");
    apply_override(cfg, "model.E=0.3");
    REQUIRE(cfg.model.E == 0.3);
    apply_override(cfg, "integrate.record_periods=7");
    REQUIRE(cfg.integrate.record_periods == 7);
    apply_override(cfg, "analysis.target=primary");
    REQUIRE(cfg.analysis.target == ResonanceTarget::Primary);
    REQUIRE_THROWS_AS(apply_override(cfg, "nonsense"), ConfigError);
    REQUIRE_THROWS_AS(apply_override(cfg, "model.nope=1"), ConfigError);
    REQUIRE_THROWS_AS(apply_override(cfg, "model.W4=-3"), ConfigError);
}

TEST_CASE("CSV emission: header-only and single-row tables", "[cli_io]") {
    CsvTable empty;
    empty.columns = {"sigma1", "p1", "p2", "p3", "stable"};
    REQUIRE(to_csv_text(empty) == "sigma1,p1,p2,p3,stable\n");

    CsvTable one = empty;
    one.rows.push_back({0.25, 0.5062, 0.7473, 0.1973, true});
    const std::string text = to_csv_text(one);
    REQUIRE(text == "sigma1,p1,p2,p3,stable\n0.25,0.5062,0.7473,0.1973,1\n");
    REQUIRE(text.find('\r') == std::string::npos);
}

TEST_CASE("CSV numbers survive a write/read round trip bit-exactly",
          "[cli_io]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> esc(-300, 300);
    CsvTable table;
    table.columns = {"x"};
    std::vector<double> values;
    for (int i = 0; i < 300; ++i) {
        const double v = std::ldexp(u(rng), esc(rng));
        values.push_back(v);
        table.rows.push_back({v});
    }
    values.push_back(-0.0);
    table.rows.push_back({-0.0});
    values.push_back(5e-324); // smallest denormal
    table.rows.push_back({5e-324});

    const RawCsv parsed = parse_csv(to_csv_text(table));
    REQUIRE(parsed.columns == std::vector<std::string>{"x"});
    REQUIRE(parsed.rows.size() == values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double back = parse_double_exact(parsed.rows[i][0]);
        REQUIRE(std::memcmp(&back, &values[i], sizeof(double)) == 0);
    }
}

TEST_CASE("CSV emission is deterministic", "[cli_io]") {
    CsvTable t;
    t.columns = {"a", "b"};
    t.rows.push_back({1.0 / 3.0, std::string("abc")});
    t.rows.push_back({CsvValue{}, 7LL});
    REQUIRE(to_csv_text(t) == to_csv_text(t));
    REQUIRE(to_csv_text(t) == "a,b\n0.3333333333333333,abc\n,7\n");
}

TEST_CASE("CSV rejects fields that would break the format", "[cli_io]") {
    CsvTable t;
    t.columns = {"a"};
    t.rows.push_back({std::string("bad,field")});
    REQUIRE_THROWS_AS(to_csv_text(t), Error);
    t.rows.clear();
    t.rows.push_back({1.0, 2.0});
    REQUIRE_THROWS_AS(to_csv_text(t), Error);
}

TEST_CASE("SVG: a two-point series renders one polyline with two vertices",
          "[cli_io]") {
    SvgSeries s;
    s.points = {{0.0, 0.0}, {1.0, 2.0}};
    const std::string svg = render_svg({s});
    REQUIRE(count_occurrences(svg, "<polyline") == 1);
    const std::size_t start = svg.find("points=\"");
    const std::size_t end = svg.find('"', start + 8);
    const std::string pts = svg.substr(start + 8, end - start - 8);
    REQUIRE(count_occurrences(pts, ",") == 2);
}

TEST_CASE("SVG: scatter series are marker-only", "[cli_io]") {
    SvgSeries s;
    s.kind = SvgSeries::Kind::Scatter;
    for (int i = 0; i < 17; ++i) s.points.push_back({i * 0.1, i * 0.2});
    const std::string svg = render_svg({s});
    REQUIRE(count_occurrences(svg, "<circle") == 17);
    REQUIRE(count_occurrences(svg, "<polyline") == 0);
}

TEST_CASE("SVG: mixed stability renders both style classes", "[cli_io]") {
    SvgSeries stable, unstable;
    stable.style = SvgSeries::Style::Stable;
    stable.points = {{0, 0}, {1, 1}, {2, 0.5}};
    unstable.style = SvgSeries::Style::Unstable;
    unstable.points = {{0, 1}, {1, 0.2}};
    const std::string svg = render_svg({stable, unstable});
    REQUIRE(count_occurrences(svg, "class=\"series stable\"") == 1);
    REQUIRE(count_occurrences(svg, "class=\"series unstable\"") == 1);
    REQUIRE(svg.find("stroke-dasharray:6 4") != std::string::npos);
}

TEST_CASE("SVG rejects empty input", "[cli_io]") {
    REQUIRE_THROWS_AS(render_svg({}), InvalidParameter);
    SvgSeries empty;
    REQUIRE_THROWS_AS(render_svg({empty}), InvalidParameter);
}
