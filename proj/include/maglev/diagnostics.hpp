#pragma once

// =============================================================================
// Stroboscopic Poincare sections, response classification, bifurcation sweeps
// =============================================================================

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "maglev/core_model.hpp"
#include "maglev/errors.hpp"
#include "maglev/integrator.hpp"

namespace maglev {

/// Which coordinate pair of the state a diagnostic looks at.
enum class Variable { Y, Q1, Q2 };

inline const char* name(Variable v) {
    switch (v) {
        case Variable::Y: return "Y";
        case Variable::Q1: return "Q1";
        case Variable::Q2: return "Q2";
    }
    return "?";
}

inline Variable variable_from_name(const std::string& s) {
    if (s == "Y") return Variable::Y;
    if (s == "Q1") return Variable::Q1;
    if (s == "Q2") return Variable::Q2;
    throw InvalidParameter("unknown variable '" + s + "' (expected Y, Q1 or Q2)");
}

inline std::pair<double, double> coordinate_pair(const State6& s, Variable v) {
    switch (v) {
        case Variable::Y: return {s.Y, s.dY};
        case Variable::Q1: return {s.Q1, s.dQ1};
        case Variable::Q2: return {s.Q2, s.dQ2};
    }
    return {0, 0};
}

/// Once-per-forcing-period samples of one coordinate pair.
struct PoincareSection {
    std::vector<std::pair<double, double>> points;
    Variable variable = Variable::Y;
};

/// Periodicity label of a steady response.
struct ResponseClass {
    enum class Label { Periodic, Aperiodic };
    Label label = Label::Periodic;
    int period = 0;          ///< cluster count when periodic (k <= 8)
    int distinct_points = 0; ///< cluster count at the classification tolerance

    bool aperiodic() const { return label == Label::Aperiodic; }
    std::string to_string() const {
        return aperiodic() ? "aperiodic" : "period-" + std::to_string(period);
    }
};

/// Poincare samples of one variable over a monotonic parameter grid, stored
/// in sweep order (descending sweeps probe the other hysteresis branch).
struct BifurcationDiagram {
    std::string param_name;
    Variable variable = Variable::Y;
    std::vector<double> param_values;
    std::vector<std::vector<double>> samples; ///< section values per grid value
    std::vector<bool> diverged;               ///< integration blew up here
};

// =============================================================================
// Operations
// =============================================================================

/// Stroboscopic section: the state once per forcing period, taken on exact
/// grid hits (the integrator ties its step to the period, so no interpolation
/// is involved).
inline PoincareSection poincare(const Trajectory& tr, const DimlessParams& d,
                                Variable variable) {
    const double period = 2.0 * M_PI / d.Omega;
    const double steps = period / tr.dt;
    const int spp = static_cast<int>(std::lround(steps));
    if (spp < 1 || std::fabs(steps - spp) > 1e-9 * steps)
        throw GridMismatch(
            "poincare: 2*pi/Omega is not an integer multiple of dt");
    if (tr.samples.size() < static_cast<std::size_t>(spp) + 1)
        throw GridMismatch("poincare: trajectory shorter than one period");

    PoincareSection sec;
    sec.variable = variable;
    const std::size_t n_periods = (tr.samples.size() - 1) / spp;
    sec.points.reserve(n_periods);
    for (std::size_t k = 0; k < n_periods; ++k)
        sec.points.push_back(coordinate_pair(tr.samples[k * spp], variable));
    return sec;
}

namespace detail {

/// Greedy clustering at radius tol; returns the cluster count.
inline int cluster_count(const std::vector<std::pair<double, double>>& pts,
                         double tol) {
    std::vector<std::pair<double, double>> centers;
    for (const auto& p : pts) {
        bool found = false;
        for (const auto& c : centers) {
            const double dx = p.first - c.first;
            const double dy = p.second - c.second;
            if (dx * dx + dy * dy <= tol * tol) {
                found = true;
                break;
            }
        }
        if (!found) centers.push_back(p);
    }
    return static_cast<int>(centers.size());
}

inline int cluster_count(const std::vector<double>& values, double tol) {
    std::vector<double> centers;
    for (double v : values) {
        bool found = false;
        for (double c : centers)
            if (std::fabs(v - c) <= tol) {
                found = true;
                break;
            }
        if (!found) centers.push_back(v);
    }
    return static_cast<int>(centers.size());
}

} // namespace detail

/// Default clustering tolerance: keeps period-1 orbits under RK4 noise in one
/// cluster while chaotic sections spread over many.
inline constexpr double kClassifyTol = 1e-2;

/// Clusters the section points at radius tol; k clusters with k <= 8 means a
/// period-k response, more means aperiodic.
inline ResponseClass classify(const PoincareSection& sec,
                              double tol = kClassifyTol) {
    if (!(tol > 0)) throw InvalidParameter("classify: tol must be > 0");
    ResponseClass rc;
    rc.distinct_points = detail::cluster_count(sec.points, tol);
    if (rc.distinct_points <= 8) {
        rc.label = ResponseClass::Label::Periodic;
        rc.period = rc.distinct_points;
    } else {
        rc.label = ResponseClass::Label::Aperiodic;
        rc.period = 0;
    }
    return rc;
}

/// Half peak-to-peak amplitude of one coordinate over the recorded window.
inline double amplitude(const Trajectory& tr, Variable variable) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : tr.samples) {
        const double v = coordinate_pair(s, variable).first;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return 0.5 * (hi - lo);
}

/// Trapezoidal time average of the harvested power Rload * Q2'^2.  Rload is
/// factored out of the quadrature so that power ratios cancel it exactly.
inline double average_power(const Trajectory& tr, double Rload = 1.0) {
    if (!(Rload > 0)) throw InvalidParameter("average_power: Rload must be > 0");
    if (tr.samples.size() < 2)
        throw InvalidParameter("average_power: need at least 2 samples");
    double sum = 0.0;
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
        const double w =
            (k == 0 || k + 1 == tr.samples.size()) ? 0.5 : 1.0;
        sum += w * tr.samples[k].dQ2 * tr.samples[k].dQ2;
    }
    return Rload * (sum / static_cast<double>(tr.samples.size() - 1));
}

/// Mutable access to a dimensionless parameter by name (sweep plumbing).
inline double& param_ref(DimlessParams& d, const std::string& nm) {
    if (nm == "W2") return d.W2;
    if (nm == "W3") return d.W3;
    if (nm == "W4") return d.W4;
    if (nm == "alpha1") return d.alpha1;
    if (nm == "alpha2") return d.alpha2;
    if (nm == "alpha3") return d.alpha3;
    if (nm == "alpha4") return d.alpha4;
    if (nm == "alpha5") return d.alpha5;
    if (nm == "beta1") return d.beta1;
    if (nm == "beta2") return d.beta2;
    if (nm == "beta3") return d.beta3;
    if (nm == "E") return d.E;
    if (nm == "Omega") return d.Omega;
    throw InvalidParameter("unknown parameter name '" + nm + "'");
}

/// Seeding policy for bifurcation sweeps.
enum class SweepSeeding {
    Continue, ///< start each grid point from the previous final state
    Reseed    ///< start every grid point from the configured initial state
};

/// Sweeps one parameter over a strictly monotonic grid, recording the
/// Poincare values of the chosen variable at each grid point.  Continuation
/// seeding tracks attractor branches (sweeping the reversed grid follows the
/// other branch across a hysteresis window); divergence at a point is
/// recorded and the sweep continues from the configured initial state.
inline BifurcationDiagram bifurcation_sweep(const DimlessParams& d0,
                                            const std::string& param_name,
                                            const std::vector<double>& grid,
                                            const IntegrationConfig& cfg = {},
                                            Variable variable = Variable::Y,
                                            SweepSeeding seeding = SweepSeeding::Continue) {
    if (grid.empty())
        throw InvalidParameter("bifurcation_sweep: grid must be non-empty");
    const bool ascending =
        std::is_sorted(grid.begin(), grid.end()) &&
        std::adjacent_find(grid.begin(), grid.end()) == grid.end();
    const bool descending =
        std::is_sorted(grid.rbegin(), grid.rend()) &&
        std::adjacent_find(grid.rbegin(), grid.rend()) == grid.rend();
    if (!ascending && !descending)
        throw InvalidParameter(
            "bifurcation_sweep: grid must be strictly monotonic");

    BifurcationDiagram diagram;
    diagram.param_name = param_name;
    diagram.variable = variable;
    diagram.param_values = grid;
    diagram.samples.resize(grid.size());
    diagram.diverged.assign(grid.size(), false);

    State6 seed = cfg.initial_state;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        DimlessParams d = d0;
        param_ref(d, param_name) = grid[i];
        IntegrationConfig point_cfg = cfg;
        point_cfg.initial_state =
            (seeding == SweepSeeding::Continue) ? seed : cfg.initial_state;
        try {
            const Trajectory tr = integrate(d, point_cfg);
            const PoincareSection sec = poincare(tr, d, variable);
            diagram.samples[i].reserve(sec.points.size());
            for (const auto& p : sec.points)
                diagram.samples[i].push_back(p.first);
            seed = tr.samples.back();
            seed.tau = cfg.initial_state.tau; // keep forcing phase aligned
        } catch (const OverflowError&) {
            diagram.diverged[i] = true;
            seed = cfg.initial_state;
        }
    }
    return diagram;
}

/// Distinct-value count of one grid point's section values at tolerance tol.
inline int distinct_count(const std::vector<double>& values,
                          double tol = kClassifyTol) {
    return detail::cluster_count(values, tol);
}

/// Smallest grid value whose section is no longer a single cluster; NaN when
/// the whole sweep stays single-branch.  Diverged points are skipped.
inline double first_branch_split(const BifurcationDiagram& diagram,
                                 double tol = kClassifyTol) {
    for (std::size_t i = 0; i < diagram.param_values.size(); ++i) {
        if (diagram.diverged[i]) continue;
        if (distinct_count(diagram.samples[i], tol) > 1)
            return diagram.param_values[i];
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace maglev
