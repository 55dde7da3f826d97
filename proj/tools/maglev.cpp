// maglev — simulation and analysis CLI for the coupled magnetic-levitation
// harvester model.  Subcommands read a config file; --set overrides keys.
// Exit codes: 0 success, 1 validation error, 2 numerical divergence.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maglev/maglev.hpp"

namespace {

using namespace maglev;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string csv_path;
    std::string svg_path;
    bool quiet = false;
    bool reseed = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("config", args.config_path, "configuration file")
        ->required();
    cmd->add_option("--set", args.overrides,
                    "override a key, e.g. --set model.E=0.3 (repeatable)");
    cmd->add_option("--csv", args.csv_path, "CSV output path (overrides [output])");
    cmd->add_option("--svg", args.svg_path, "SVG output path (overrides [output])");
    cmd->add_flag("--quiet", args.quiet, "suppress the resolved-config echo");
}

RunConfig load(const CommonArgs& args) {
    RunConfig cfg = load_config(args.config_path);
    for (const auto& ov : args.overrides) apply_override(cfg, ov);
    if (!args.csv_path.empty()) cfg.output.csv = args.csv_path;
    if (!args.svg_path.empty()) cfg.output.svg = args.svg_path;
    if (!args.quiet) std::cerr << "# resolved configuration\n" << resolved_text(cfg);
    return cfg;
}

std::string csv_target(const RunConfig& cfg, const std::string& fallback) {
    return cfg.output.csv.empty() ? fallback : cfg.output.csv;
}

// ---------------------------------------------------------------------------

void cmd_simulate(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    const Trajectory tr = integrate(cfg.model, cfg.integrate);

    CsvTable table;
    table.columns = {"tau", "Y", "dY", "Q1", "dQ1", "Q2", "dQ2", "power"};
    for (const auto& s : tr.samples)
        table.rows.push_back({s.tau, s.Y, s.dY, s.Q1, s.dQ1, s.Q2, s.dQ2,
                              power_new(s, cfg.analysis.Rload)});
    const std::string out = csv_target(cfg, "simulate.csv");
    emit_csv(table, out);
    std::cout << "wrote " << out << " (" << tr.samples.size() << " samples)\n";

    if (!cfg.output.svg.empty()) {
        std::vector<SvgSeries> series(3);
        series[0].label = "Y";
        series[1].label = "Q1";
        series[2].label = "Q2";
        for (const auto& s : tr.samples) {
            series[0].points.push_back({s.tau, s.Y});
            series[1].points.push_back({s.tau, s.Q1});
            series[2].points.push_back({s.tau, s.Q2});
        }
        SvgStyle style;
        style.title = "time response";
        style.x_label = "tau";
        emit_svg(series, style, cfg.output.svg);
        std::cout << "wrote " << cfg.output.svg << "\n";
    }
}

void cmd_poincare(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    const Trajectory tr = integrate(cfg.model, cfg.integrate);
    const PoincareSection sec = poincare(tr, cfg.model, cfg.analysis.variable);
    const ResponseClass rc = classify(sec, cfg.analysis.tol);

    const std::string var = name(cfg.analysis.variable);
    CsvTable table;
    table.columns = {"k", var, "d" + var};
    for (std::size_t k = 0; k < sec.points.size(); ++k)
        table.rows.push_back({static_cast<long long>(k), sec.points[k].first,
                              sec.points[k].second});
    const std::string out = csv_target(cfg, "poincare.csv");
    emit_csv(table, out);
    std::cout << "classification: " << rc.to_string()
              << " (distinct_points=" << rc.distinct_points << ")\n"
              << "wrote " << out << "\n";

    if (!cfg.output.svg.empty()) {
        SvgSeries s;
        s.kind = SvgSeries::Kind::Scatter;
        s.points = sec.points;
        s.label = var;
        SvgStyle style;
        style.title = "Poincare section";
        style.x_label = var;
        style.y_label = "d" + var;
        emit_svg({s}, style, cfg.output.svg);
        std::cout << "wrote " << cfg.output.svg << "\n";
    }
}

void cmd_bifurcate(const CommonArgs& args) {
    RunConfig mutable_cfg = load(args);
    if (args.reseed) mutable_cfg.analysis.seeding = SweepSeeding::Reseed;
    const RunConfig& cfg = mutable_cfg;
    const AnalysisOptions& a = cfg.analysis;
    if (a.grid_n < 2 || !(a.grid_max > a.grid_min))
        throw ConfigError("bifurcate: need grid_min < grid_max and grid_n >= 2");
    std::vector<double> grid(a.grid_n);
    for (int i = 0; i < a.grid_n; ++i)
        grid[i] = a.grid_min + (a.grid_max - a.grid_min) * i / (a.grid_n - 1);

    const BifurcationDiagram diagram = bifurcation_sweep(
        cfg.model, a.param, grid, cfg.integrate, a.variable, a.seeding);

    CsvTable table;
    table.columns = {a.param, name(a.variable)};
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (double v : diagram.samples[i])
            table.rows.push_back({grid[i], v});
    const std::string out = csv_target(cfg, "bifurcate.csv");
    emit_csv(table, out);

    const double split = first_branch_split(diagram, a.tol);
    if (std::isnan(split))
        std::cout << "no branch splitting on the grid\n";
    else
        std::cout << "first branch splitting at " << a.param << " = "
                  << format_double(split) << "\n";
    std::cout << "wrote " << out << "\n";

    if (!cfg.output.svg.empty()) {
        SvgSeries s;
        s.kind = SvgSeries::Kind::Scatter;
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (double v : diagram.samples[i]) s.points.push_back({grid[i], v});
        SvgStyle style;
        style.title = "bifurcation diagram";
        style.x_label = a.param;
        style.y_label = name(a.variable);
        emit_svg({s}, style, cfg.output.svg);
        std::cout << "wrote " << cfg.output.svg << "\n";
    }
}

void freq_csv_and_svg(const RunConfig& cfg, const FreqRespCurve& curve,
                      const std::string& fallback) {
    CsvTable table;
    table.columns = {"sigma1", "p1", "p2", "p3", "stable"};
    for (const auto& p : curve.points)
        table.rows.push_back({p.sigma1, p.p1, p.p2, p.p3, p.stable});
    const std::string out = csv_target(cfg, fallback);
    emit_csv(table, out);
    if (const FreqRespPoint* peak = curve.peak_p3())
        std::cout << "peak p3 = " << format_double(peak->p3) << " at sigma1 = "
                  << format_double(peak->sigma1) << "\n";
    std::cout << "wrote " << out << "\n";

    if (!cfg.output.svg.empty()) {
        SvgSeries stable_s, unstable_s;
        stable_s.style = SvgSeries::Style::Stable;
        stable_s.label = "p3 stable";
        unstable_s.style = SvgSeries::Style::Unstable;
        unstable_s.label = "p3 unstable";
        for (const auto& p : curve.points)
            (p.stable ? stable_s : unstable_s).points.push_back({p.sigma1, p.p3});
        std::vector<SvgSeries> series;
        if (!stable_s.points.empty()) series.push_back(stable_s);
        if (!unstable_s.points.empty()) series.push_back(unstable_s);
        SvgStyle style;
        style.title = "frequency response";
        style.x_label = "sigma1";
        style.y_label = "p3";
        emit_svg(series, style, cfg.output.svg);
        std::cout << "wrote " << cfg.output.svg << "\n";
    }
}

void cmd_freqresp_internal(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    DimlessParams d = cfg.model;
    if (cfg.analysis.retune_auto)
        d = retune_capacitance(d, ResonanceTarget::Internal).params;
    InternalSolveOptions opt;
    opt.p1_max = cfg.analysis.p1_max;
    opt.scan_points = cfg.analysis.scan_points;
    const double lo = cfg.analysis.sigma1_min.value_or(-0.4);
    const double hi = cfg.analysis.sigma1_max.value_or(0.4);
    const FreqRespCurve curve =
        freq_response_internal(d.E, d, lo, hi, cfg.analysis.n_points, opt);
    freq_csv_and_svg(cfg, curve, "freqresp_internal.csv");
}

void cmd_freqresp_primary(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    DimlessParams d = cfg.model;
    if (cfg.analysis.retune_auto)
        d = retune_capacitance(d, ResonanceTarget::Primary).params;
    const double lo = cfg.analysis.sigma1_min.value_or(-0.6);
    const double hi = cfg.analysis.sigma1_max.value_or(0.6);
    const FreqRespCurve curve =
        freq_response_primary(d.E, d, lo, hi, cfg.analysis.n_points);
    freq_csv_and_svg(cfg, curve, "freqresp_primary.csv");
}

void cmd_sweep(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    const AnalysisOptions& a = cfg.analysis;
    if (a.vary.empty() || a.values.empty())
        throw ConfigError("sweep: analysis.vary and analysis.values are required");

    SweepSpec spec;
    spec.base = cfg.model;
    spec.physical = cfg.physical;
    spec.vary = a.vary;
    spec.vary2 = a.vary2;
    spec.values = a.values;
    spec.values2 = a.values2;
    spec.analysis = a.sweep_analysis;
    spec.icfg = cfg.integrate;
    const bool primary = a.sweep_analysis == SweepAnalysis::FreqPrimary;
    spec.sigma1_lo = a.sigma1_min.value_or(primary ? -0.6 : -0.4);
    spec.sigma1_hi = a.sigma1_max.value_or(primary ? 0.6 : 0.4);
    spec.n_points = a.n_points;
    spec.variable = a.variable;
    spec.Rload = a.Rload;
    spec.classify_tol = a.tol;
    spec.solve_opts.p1_max = a.p1_max;
    spec.solve_opts.scan_points = a.scan_points;

    const SweepResult result = family_sweep(spec);

    CsvTable table;
    table.columns = {"value",          "value2", "peak_amplitude",
                     "sigma1_at_peak", "label",  "distinct_points",
                     "avg_power",      "error"};
    for (const auto& r : result.records) {
        std::vector<CsvValue> row;
        row.emplace_back(r.value);
        row.emplace_back(std::isnan(r.value2) ? CsvValue{} : CsvValue{r.value2});
        row.emplace_back(std::isnan(r.peak_amplitude) ? CsvValue{}
                                                      : CsvValue{r.peak_amplitude});
        row.emplace_back(std::isnan(r.sigma1_at_peak) ? CsvValue{}
                                                      : CsvValue{r.sigma1_at_peak});
        row.emplace_back(r.label.empty() ? CsvValue{} : CsvValue{r.label});
        row.emplace_back(r.distinct_points < 0
                             ? CsvValue{}
                             : CsvValue{static_cast<long long>(r.distinct_points)});
        row.emplace_back(std::isnan(r.avg_power) ? CsvValue{}
                                                 : CsvValue{r.avg_power});
        row.emplace_back(r.error.empty() ? CsvValue{} : CsvValue{r.error});
        table.rows.push_back(std::move(row));
    }
    const std::string out = csv_target(cfg, "sweep.csv");
    emit_csv(table, out);
    std::cout << "wrote " << out << " (" << result.records.size() << " records)\n";
}

void cmd_chaos_grid(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    const auto entries = chaos_grid(cfg.model, cfg.analysis.pairs, cfg.integrate,
                                    cfg.analysis.variable, cfg.analysis.tol);

    CsvTable table;
    table.columns = {"alpha2", "beta2", "label", "distinct_points", "diverged"};
    for (const auto& e : entries)
        table.rows.push_back({e.alpha2, e.beta2,
                              e.diverged ? std::string("diverged")
                                         : e.response.to_string(),
                              static_cast<long long>(e.response.distinct_points),
                              e.diverged});
    const std::string out = csv_target(cfg, "chaos_grid.csv");
    emit_csv(table, out);
    for (const auto& e : entries)
        std::cout << "(" << format_double(e.alpha2) << ", " << format_double(e.beta2)
                  << ") -> "
                  << (e.diverged ? std::string("diverged") : e.response.to_string())
                  << " distinct=" << e.response.distinct_points << "\n";
    std::cout << "wrote " << out << "\n";
}

void cmd_power_compare(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    const PowerComparison pc =
        power_compare(cfg.model, cfg.integrate, cfg.analysis.Rload);

    CsvTable table;
    table.columns = {"internal_avg", "primary_avg", "ratio",
                     "cs_multiplier_internal", "cs_multiplier_primary"};
    table.rows.push_back({pc.internal_avg, pc.primary_avg,
                          pc.ratio ? CsvValue{*pc.ratio} : CsvValue{},
                          pc.cs_multiplier_internal, pc.cs_multiplier_primary});
    const std::string out = csv_target(cfg, "power_compare.csv");
    emit_csv(table, out);

    std::cout << "internal avg power = " << format_double(pc.internal_avg)
              << "\nprimary  avg power = " << format_double(pc.primary_avg) << "\n";
    if (pc.ratio)
        std::cout << "primary/internal ratio = " << format_double(*pc.ratio) << "\n";
    else
        std::cout << "primary/internal ratio undefined (internal average is 0)\n";
    std::cout << "wrote " << out << "\n";
}

void cmd_energy_audit(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    const Trajectory tr = integrate(cfg.model, cfg.integrate);
    const double residual = energy_audit(tr, cfg.model);

    CsvTable table;
    table.columns = {"max_relative_residual", "steps_per_period",
                     "record_periods", "dt"};
    table.rows.push_back({residual,
                          static_cast<long long>(cfg.integrate.steps_per_period),
                          static_cast<long long>(cfg.integrate.record_periods),
                          tr.dt});
    const std::string out = csv_target(cfg, "energy_audit.csv");
    emit_csv(table, out);
    std::cout << "energy balance max relative residual = "
              << format_double(residual) << "\nwrote " << out << "\n";
}

void cmd_retune(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    const RetunedParams r = retune_capacitance(cfg.model, cfg.analysis.target);
    RunConfig out = cfg;
    out.model = r.params;
    std::cerr << "# Cs multiplier = " << format_double(r.cs_multiplier)
              << ", Ct multiplier = " << format_double(r.ct_multiplier) << "\n";
    std::cout << resolved_text(out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"magnetic-levitation energy-harvester simulation and analysis"};
    app.require_subcommand(1);

    struct Entry {
        const char* name;
        const char* help;
        void (*run)(const CommonArgs&);
        CommonArgs args;
    };
    std::vector<Entry> entries = {
        {"simulate", "integrate the model and dump the steady window",
         cmd_simulate, {}},
        {"poincare", "stroboscopic section and response classification",
         cmd_poincare, {}},
        {"bifurcate", "sweep a parameter and record section values",
         cmd_bifurcate, {}},
        {"freqresp-internal", "internal-resonance frequency response",
         cmd_freqresp_internal, {}},
        {"freqresp-primary", "primary-resonance frequency response",
         cmd_freqresp_primary, {}},
        {"sweep", "family study over a parameter grid", cmd_sweep, {}},
        {"chaos-grid", "classify responses over (alpha2, beta2) pairs",
         cmd_chaos_grid, {}},
        {"power-compare", "average harvested power: internal vs primary tuning",
         cmd_power_compare, {}},
        {"energy-audit", "energy-balance residual of an integration",
         cmd_energy_audit, {}},
        {"retune", "emit the config retuned to a resonance target", cmd_retune, {}},
    };
    for (auto& e : entries) {
        CLI::App* cmd = app.add_subcommand(e.name, e.help);
        add_common(cmd, e.args);
        if (std::string(e.name) == "bifurcate")
            cmd->add_flag("--reseed", e.args.reseed,
                          "restart every grid point from the configured "
                          "initial state instead of continuing");
        cmd->callback([&e] { e.run(e.args); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const maglev::OverflowError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const maglev::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
