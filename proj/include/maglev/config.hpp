#pragma once

// =============================================================================
// Line-oriented configuration: [section] headers and key = value pairs
// =============================================================================
//
// Sections: model, physical, integrate, analysis, output.  '#' starts a
// comment.  [model] is required and lists every dimensionless coefficient;
// [physical] is optional but must be complete when present.  Unknown sections
// or keys are rejected with their line number; missing required keys are
// listed together.

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maglev/core_model.hpp"
#include "maglev/csv.hpp"
#include "maglev/diagnostics.hpp"
#include "maglev/errors.hpp"
#include "maglev/integrator.hpp"
#include "maglev/ms_internal.hpp"
#include "maglev/sweeps.hpp"

namespace maglev {

/// Options consumed by the analysis subcommands.  Every key is schema-checked
/// even when the current subcommand does not use it.
struct AnalysisOptions {
    Variable variable = Variable::Y;
    double tol = kClassifyTol;
    std::optional<double> sigma1_min; ///< per-command default when unset
    std::optional<double> sigma1_max;
    int n_points = 81;
    double p1_max = 3.0;
    int scan_points = 2000;
    std::string param = "E";
    double grid_min = 0.0;
    double grid_max = 5.0;
    int grid_n = 400;
    SweepSeeding seeding = SweepSeeding::Continue;
    std::vector<std::pair<double, double>> pairs = {
        {0.0, 0.0}, {0.2, 0.15}, {0.5, 0.375}, {0.8, 0.6}};
    ResonanceTarget target = ResonanceTarget::Internal;
    std::string vary;
    std::string vary2;
    std::vector<double> values;
    std::vector<double> values2;
    SweepAnalysis sweep_analysis = SweepAnalysis::FreqInternal;
    double Rload = 1.0;
    bool retune_auto = true; ///< freqresp commands retune to their regime first
};

struct OutputOptions {
    std::string csv;
    std::string svg;
};

/// Fully validated run configuration with every default materialized.
struct RunConfig {
    DimlessParams model;
    std::optional<PhysicalParams> physical;
    IntegrationConfig integrate;
    AnalysisOptions analysis;
    OutputOptions output;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline double cfg_double(std::string_view v, int line) {
    try {
        return parse_double_exact(trim(v));
    } catch (const Error&) {
        throw ConfigError("line " + std::to_string(line) +
                              ": expected a number, got '" + std::string(trim(v)) +
                              "'",
                          line);
    }
}

inline int cfg_int(std::string_view v, int line) {
    const double x = cfg_double(v, line);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x)
        throw ConfigError("line " + std::to_string(line) +
                              ": expected an integer, got '" +
                              std::string(trim(v)) + "'",
                          line);
    return i;
}

inline std::vector<std::string> split(std::string_view v, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t c = v.find(sep, start);
        if (c == std::string_view::npos) {
            out.emplace_back(trim(v.substr(start)));
            break;
        }
        out.emplace_back(trim(v.substr(start, c - start)));
        start = c + 1;
    }
    return out;
}

inline std::vector<double> cfg_list(std::string_view v, int line) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    for (const auto& tok : split(v, ',')) out.push_back(cfg_double(tok, line));
    return out;
}

inline std::vector<std::pair<double, double>> cfg_pairs(std::string_view v,
                                                        int line) {
    std::vector<std::pair<double, double>> out;
    if (trim(v).empty()) return out;
    for (const auto& tok : split(v, ',')) {
        const auto parts = split(tok, ':');
        if (parts.size() != 2)
            throw ConfigError("line " + std::to_string(line) +
                                  ": expected 'a:b' pair, got '" + tok + "'",
                              line);
        out.emplace_back(cfg_double(parts[0], line), cfg_double(parts[1], line));
    }
    return out;
}

inline const std::vector<std::string>& model_keys() {
    static const std::vector<std::string> keys = {
        "W2",     "W3",     "W4",    "alpha1", "alpha2", "alpha3", "alpha4",
        "alpha5", "beta1",  "beta2", "beta3",  "E",      "Omega"};
    return keys;
}

inline const std::vector<std::string>& physical_keys() {
    static const std::vector<std::string> keys = {
        "m",  "g",  "k1", "k3", "S1", "S2",        "Cme", "Ls", "Rs",
        "Cs", "Lt", "Rt", "Ct", "e",  "Omega_hat", "x0",  "q0"};
    return keys;
}

inline double& physical_ref(PhysicalParams& p, const std::string& key) {
    if (key == "m") return p.m;
    if (key == "g") return p.g;
    if (key == "k1") return p.k1;
    if (key == "k3") return p.k3;
    if (key == "S1") return p.S1;
    if (key == "S2") return p.S2;
    if (key == "Cme") return p.Cme;
    if (key == "Ls") return p.Ls;
    if (key == "Rs") return p.Rs;
    if (key == "Cs") return p.Cs;
    if (key == "Lt") return p.Lt;
    if (key == "Rt") return p.Rt;
    if (key == "Ct") return p.Ct;
    if (key == "e") return p.e;
    if (key == "Omega_hat") return p.Omega_hat;
    if (key == "x0") return p.x0;
    if (key == "q0") return p.q0;
    throw InvalidParameter("unknown physical parameter '" + key + "'");
}

/// Dispatches one integrate/analysis/output key.  Model and physical keys are
/// handled by the callers (the parser tracks which required keys were seen).
inline void apply_section_key(RunConfig& cfg, const std::string& section,
                              const std::string& key, const std::string& value,
                              int ln) {
    auto unknown = [&]() -> ConfigError {
        return ConfigError("line " + std::to_string(ln) + ": unknown key '" +
                               section + "." + key + "'",
                           ln);
    };
    if (section == "integrate") {
        if (key == "steps_per_period")
            cfg.integrate.steps_per_period = cfg_int(value, ln);
        else if (key == "transient_periods")
            cfg.integrate.transient_periods = cfg_int(value, ln);
        else if (key == "record_periods")
            cfg.integrate.record_periods = cfg_int(value, ln);
        else if (key == "tau0")
            cfg.integrate.initial_state.tau = cfg_double(value, ln);
        else if (key == "y0")
            cfg.integrate.initial_state.Y = cfg_double(value, ln);
        else if (key == "dy0")
            cfg.integrate.initial_state.dY = cfg_double(value, ln);
        else if (key == "q10")
            cfg.integrate.initial_state.Q1 = cfg_double(value, ln);
        else if (key == "dq10")
            cfg.integrate.initial_state.dQ1 = cfg_double(value, ln);
        else if (key == "q20")
            cfg.integrate.initial_state.Q2 = cfg_double(value, ln);
        else if (key == "dq20")
            cfg.integrate.initial_state.dQ2 = cfg_double(value, ln);
        else
            throw unknown();
        return;
    }
    if (section == "analysis") {
        AnalysisOptions& a = cfg.analysis;
        try {
            if (key == "variable")
                a.variable = variable_from_name(value);
            else if (key == "tol")
                a.tol = cfg_double(value, ln);
            else if (key == "sigma1_min")
                a.sigma1_min = cfg_double(value, ln);
            else if (key == "sigma1_max")
                a.sigma1_max = cfg_double(value, ln);
            else if (key == "n_points")
                a.n_points = cfg_int(value, ln);
            else if (key == "p1_max")
                a.p1_max = cfg_double(value, ln);
            else if (key == "scan_points")
                a.scan_points = cfg_int(value, ln);
            else if (key == "param")
                a.param = value;
            else if (key == "grid_min")
                a.grid_min = cfg_double(value, ln);
            else if (key == "grid_max")
                a.grid_max = cfg_double(value, ln);
            else if (key == "grid_n")
                a.grid_n = cfg_int(value, ln);
            else if (key == "seeding") {
                if (value == "continue")
                    a.seeding = SweepSeeding::Continue;
                else if (value == "reseed")
                    a.seeding = SweepSeeding::Reseed;
                else
                    throw InvalidParameter("seeding must be 'continue' or 'reseed'");
            } else if (key == "pairs")
                a.pairs = cfg_pairs(value, ln);
            else if (key == "target")
                a.target = target_from_name(value);
            else if (key == "vary")
                a.vary = value;
            else if (key == "vary2")
                a.vary2 = value;
            else if (key == "values")
                a.values = cfg_list(value, ln);
            else if (key == "values2")
                a.values2 = cfg_list(value, ln);
            else if (key == "analysis")
                a.sweep_analysis = analysis_from_name(value);
            else if (key == "Rload")
                a.Rload = cfg_double(value, ln);
            else if (key == "retune") {
                if (value == "auto")
                    a.retune_auto = true;
                else if (value == "off")
                    a.retune_auto = false;
                else
                    throw InvalidParameter("retune must be 'auto' or 'off'");
            } else
                throw unknown();
        } catch (const InvalidParameter& e) {
            throw ConfigError("line " + std::to_string(ln) + ": " + e.what(), ln);
        }
        return;
    }
    if (section == "output") {
        if (key == "csv")
            cfg.output.csv = value;
        else if (key == "svg")
            cfg.output.svg = value;
        else
            throw unknown();
        return;
    }
    throw ConfigError("line " + std::to_string(ln) + ": unknown section [" +
                          section + "]",
                      ln);
}

inline void validate_final(RunConfig& cfg) {
    try {
        validate(cfg.model);
        validate(cfg.integrate);
        if (cfg.physical) validate(*cfg.physical);
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    if (!cfg.analysis.vary2.empty() &&
        cfg.analysis.values2.size() != cfg.analysis.values.size())
        throw ConfigError(
            "invalid configuration: analysis.values2 must parallel "
            "analysis.values when analysis.vary2 is set");
}

} // namespace detail

/// Parses and validates configuration text.  Throws ConfigError carrying the
/// offending line (and column, for malformed lines).
inline RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::map<std::string, double> model_seen;
    std::map<std::string, double> physical_seen;
    std::set<std::string> seen_keys;
    bool saw_physical_section = false;

    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view raw = text.substr(pos, eol - pos);
        const bool last = eol == text.size();
        pos = eol + 1;
        ++line_no;
        if (last && raw.empty()) break;

        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) {
            if (last) break;
            continue;
        }

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) +
                                      ": unterminated section header",
                                  line_no, static_cast<int>(line.size()));
            const std::string name(detail::trim(line.substr(1, line.size() - 2)));
            if (name != "model" && name != "physical" && name != "integrate" &&
                name != "analysis" && name != "output")
                throw ConfigError("line " + std::to_string(line_no) +
                                      ": unknown section [" + name + "]",
                                  line_no);
            section = name;
            if (name == "physical") saw_physical_section = true;
            if (last) break;
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            const auto first = raw.find_first_not_of(" \t");
            const int col = first == std::string_view::npos
                                ? 1
                                : static_cast<int>(first) + 1;
            throw ConfigError("line " + std::to_string(line_no) +
                                  ": expected 'key = value'",
                              line_no, col);
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key",
                              line_no, 1);
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": key '" +
                                  key + "' appears before any [section]",
                              line_no);
        if (!seen_keys.insert(section + "." + key).second)
            throw ConfigError("line " + std::to_string(line_no) +
                                  ": duplicate key '" + section + "." + key + "'",
                              line_no);

        if (section == "model") {
            bool known = false;
            for (const auto& k : detail::model_keys()) known |= (k == key);
            if (!known)
                throw ConfigError("line " + std::to_string(line_no) +
                                      ": unknown key 'model." + key + "'",
                                  line_no);
            model_seen[key] = detail::cfg_double(value, line_no);
        } else if (section == "physical") {
            bool known = false;
            for (const auto& k : detail::physical_keys()) known |= (k == key);
            if (!known)
                throw ConfigError("line " + std::to_string(line_no) +
                                      ": unknown key 'physical." + key + "'",
                                  line_no);
            physical_seen[key] = detail::cfg_double(value, line_no);
        } else {
            detail::apply_section_key(cfg, section, key, value, line_no);
        }
        if (last) break;
    }

    std::string missing;
    for (const auto& key : detail::model_keys())
        if (!model_seen.count(key))
            missing += (missing.empty() ? "" : ", ") + ("model." + key);
    if (!missing.empty())
        throw ConfigError("missing required keys: " + missing);
    for (const auto& key : detail::model_keys())
        param_ref(cfg.model, key) = model_seen[key];

    if (saw_physical_section) {
        std::string missing_phys;
        for (const auto& key : detail::physical_keys())
            if (!physical_seen.count(key))
                missing_phys +=
                    (missing_phys.empty() ? "" : ", ") + ("physical." + key);
        if (!missing_phys.empty())
            throw ConfigError("missing required keys: " + missing_phys);
        PhysicalParams p;
        for (const auto& key : detail::physical_keys())
            detail::physical_ref(p, key) = physical_seen[key];
        cfg.physical = p;
    }

    detail::validate_final(cfg);
    return cfg;
}

/// Reads and parses a configuration file; the path is prefixed to any error.
inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what(), e.line(), e.column());
    }
}

/// Applies one "section.key=value" override with the same validation as the
/// file parser.
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    const std::size_t dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw ConfigError("override must look like section.key=value, got '" +
                          assignment + "'");
    const std::string section(detail::trim(assignment.substr(0, dot)));
    const std::string key(detail::trim(assignment.substr(dot + 1, eq - dot - 1)));
    const std::string value(detail::trim(assignment.substr(eq + 1)));

    if (section == "model") {
        try {
            param_ref(cfg.model, key) = detail::cfg_double(value, 0);
        } catch (const InvalidParameter& e) {
            throw ConfigError(std::string("override: ") + e.what());
        }
    } else if (section == "physical") {
        if (!cfg.physical)
            throw ConfigError(
                "override: physical.* requires a [physical] section in the config");
        try {
            detail::physical_ref(*cfg.physical, key) = detail::cfg_double(value, 0);
        } catch (const InvalidParameter& e) {
            throw ConfigError(std::string("override: ") + e.what());
        }
    } else {
        detail::apply_section_key(cfg, section, key, value, 0);
    }
    detail::validate_final(cfg);
}

/// Renders the effective configuration (defaults materialized) in the same
/// format the parser accepts.
inline std::string resolved_text(const RunConfig& cfg) {
    std::string out;
    auto kv = [&out](const std::string& k, const std::string& v) {
        out += k + " = " + v + "\n";
    };

    out += "[model]\n";
    {
        DimlessParams m = cfg.model;
        for (const auto& k : detail::model_keys())
            kv(k, format_double(param_ref(m, k)));
    }
    if (cfg.physical) {
        out += "[physical]\n";
        PhysicalParams p = *cfg.physical;
        for (const auto& k : detail::physical_keys())
            kv(k, format_double(detail::physical_ref(p, k)));
    }
    out += "[integrate]\n";
    kv("steps_per_period", std::to_string(cfg.integrate.steps_per_period));
    kv("transient_periods", std::to_string(cfg.integrate.transient_periods));
    kv("record_periods", std::to_string(cfg.integrate.record_periods));
    kv("tau0", format_double(cfg.integrate.initial_state.tau));
    kv("y0", format_double(cfg.integrate.initial_state.Y));
    kv("dy0", format_double(cfg.integrate.initial_state.dY));
    kv("q10", format_double(cfg.integrate.initial_state.Q1));
    kv("dq10", format_double(cfg.integrate.initial_state.dQ1));
    kv("q20", format_double(cfg.integrate.initial_state.Q2));
    kv("dq20", format_double(cfg.integrate.initial_state.dQ2));

    const AnalysisOptions& a = cfg.analysis;
    out += "[analysis]\n";
    kv("variable", name(a.variable));
    kv("tol", format_double(a.tol));
    if (a.sigma1_min) kv("sigma1_min", format_double(*a.sigma1_min));
    if (a.sigma1_max) kv("sigma1_max", format_double(*a.sigma1_max));
    kv("n_points", std::to_string(a.n_points));
    kv("p1_max", format_double(a.p1_max));
    kv("scan_points", std::to_string(a.scan_points));
    kv("param", a.param);
    kv("grid_min", format_double(a.grid_min));
    kv("grid_max", format_double(a.grid_max));
    kv("grid_n", std::to_string(a.grid_n));
    kv("seeding", a.seeding == SweepSeeding::Continue ? "continue" : "reseed");
    {
        std::string pairs;
        for (const auto& pr : a.pairs) {
            if (!pairs.empty()) pairs += ", ";
            pairs += format_double(pr.first) + ":" + format_double(pr.second);
        }
        kv("pairs", pairs);
    }
    kv("target", a.target == ResonanceTarget::Internal ? "internal" : "primary");
    if (!a.vary.empty()) kv("vary", a.vary);
    if (!a.vary2.empty()) kv("vary2", a.vary2);
    {
        std::string vals;
        for (double v : a.values) {
            if (!vals.empty()) vals += ", ";
            vals += format_double(v);
        }
        if (!vals.empty()) kv("values", vals);
        std::string vals2;
        for (double v : a.values2) {
            if (!vals2.empty()) vals2 += ", ";
            vals2 += format_double(v);
        }
        if (!vals2.empty()) kv("values2", vals2);
    }
    switch (a.sweep_analysis) {
        case SweepAnalysis::FreqInternal: kv("analysis", "freq_internal"); break;
        case SweepAnalysis::FreqPrimary: kv("analysis", "freq_primary"); break;
        case SweepAnalysis::SimulatePoincare:
            kv("analysis", "simulate+poincare");
            break;
        case SweepAnalysis::Power: kv("analysis", "power"); break;
    }
    kv("Rload", format_double(a.Rload));
    kv("retune", a.retune_auto ? "auto" : "off");

    out += "[output]\n";
    if (!cfg.output.csv.empty()) kv("csv", cfg.output.csv);
    if (!cfg.output.svg.empty()) kv("svg", cfg.output.svg);
    return out;
}

} // namespace maglev
