#pragma once

// =============================================================================
// Parameter studies: capacitance retuning, family sweeps, chaos grids,
// regime power comparison
// =============================================================================

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maglev/core_model.hpp"
#include "maglev/diagnostics.hpp"
#include "maglev/errors.hpp"
#include "maglev/integrator.hpp"
#include "maglev/ms_internal.hpp"
#include "maglev/ms_primary.hpp"
#include "maglev/parallel.hpp"

namespace maglev {

// =============================================================================
// Capacitance retuning
// =============================================================================

enum class ResonanceTarget { Internal, Primary };

inline ResonanceTarget target_from_name(const std::string& s) {
    if (s == "internal") return ResonanceTarget::Internal;
    if (s == "primary") return ResonanceTarget::Primary;
    throw InvalidParameter("unknown retune target '" + s +
                           "' (expected internal or primary)");
}

/// Retuned parameter set plus the physical capacitance multipliers that
/// realize it (Cs and Ct scale inversely with W4 and beta3).
struct RetunedParams {
    DimlessParams params;
    double cs_multiplier = 1;
    double ct_multiplier = 1;
};

/// Internal target: both circuit frequencies moved onto the mechanical
/// frequency (W4 = beta3 = 1).  Primary target: both moved onto the forcing
/// frequency (W4 = beta3 = Omega^2).  Idempotent per target.
inline RetunedParams retune_capacitance(const DimlessParams& d,
                                        ResonanceTarget target) {
    if (!(d.W4 > 0) || !(d.beta3 > 0))
        throw InvalidParameter("retune_capacitance: W4 and beta3 must be > 0");

    double w4_target = 1.0;
    if (target == ResonanceTarget::Primary) {
        if (!(d.Omega > 0))
            throw InvalidParameter(
                "retune_capacitance: Omega must be > 0 for the primary target");
        w4_target = d.Omega * d.Omega;
    }

    RetunedParams r;
    r.params = d;
    r.cs_multiplier = d.W4 / w4_target;
    r.ct_multiplier = d.beta3 / w4_target;
    r.params.W4 = w4_target;
    r.params.beta3 = w4_target;
    return r;
}

// =============================================================================
// Chaos-suppression grid
// =============================================================================

struct ChaosGridEntry {
    double alpha2 = 0;
    double beta2 = 0;
    ResponseClass response;
    bool diverged = false;
};

/// Integrates the base set at each (alpha2, beta2) pair and classifies the
/// Poincare section of the chosen variable.  Divergence at a pair is recorded
/// and the grid continues.
inline std::vector<ChaosGridEntry> chaos_grid(
    const DimlessParams& base, const std::vector<std::pair<double, double>>& pairs,
    const IntegrationConfig& cfg = {}, Variable variable = Variable::Y,
    double tol = kClassifyTol) {
    if (pairs.empty()) throw InvalidParameter("chaos_grid: pairs must be non-empty");

    std::vector<ChaosGridEntry> out(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
        ChaosGridEntry& entry = out[i];
        entry.alpha2 = pairs[i].first;
        entry.beta2 = pairs[i].second;
        DimlessParams d = base;
        d.alpha2 = entry.alpha2;
        d.beta2 = entry.beta2;
        try {
            const Trajectory tr = integrate(d, cfg);
            entry.response = classify(poincare(tr, d, variable), tol);
        } catch (const OverflowError&) {
            entry.diverged = true;
        }
    });
    return out;
}

// =============================================================================
// Regime power comparison
// =============================================================================

struct PowerComparison {
    double internal_avg = 0;
    double primary_avg = 0;
    std::optional<double> ratio; ///< primary/internal; empty when internal is 0
    double cs_multiplier_internal = 1;
    double cs_multiplier_primary = 1;
};

/// Retunes the set to each regime (source frequency Omega unchanged),
/// integrates both to steady state and compares average harvested power.
/// Rload cancels exactly in the ratio.
inline PowerComparison power_compare(const DimlessParams& d,
                                     const IntegrationConfig& cfg = {},
                                     double Rload = 1.0) {
    validate(d);
    const RetunedParams internal = retune_capacitance(d, ResonanceTarget::Internal);
    const RetunedParams primary = retune_capacitance(d, ResonanceTarget::Primary);

    PowerComparison pc;
    pc.cs_multiplier_internal = internal.cs_multiplier;
    pc.cs_multiplier_primary = primary.cs_multiplier;
    pc.internal_avg = average_power(integrate(internal.params, cfg), Rload);
    pc.primary_avg = average_power(integrate(primary.params, cfg), Rload);
    if (pc.internal_avg > 0) pc.ratio = pc.primary_avg / pc.internal_avg;
    return pc;
}

// =============================================================================
// Family sweeps
// =============================================================================

enum class SweepAnalysis { FreqInternal, FreqPrimary, SimulatePoincare, Power };

inline SweepAnalysis analysis_from_name(const std::string& s) {
    if (s == "freq_internal") return SweepAnalysis::FreqInternal;
    if (s == "freq_primary") return SweepAnalysis::FreqPrimary;
    if (s == "simulate+poincare") return SweepAnalysis::SimulatePoincare;
    if (s == "power") return SweepAnalysis::Power;
    throw InvalidParameter("unknown sweep analysis '" + s + "'");
}

/// One grid line of a parameter study.  vary may be any dimensionless
/// parameter name, "m" (requires the physical set, re-normalized per value),
/// or a linked pair (vary/vary2 with parallel value lists).
struct SweepSpec {
    DimlessParams base;
    std::optional<PhysicalParams> physical;
    std::string vary;
    std::vector<double> values;
    std::string vary2;            ///< optional linked second parameter
    std::vector<double> values2;  ///< parallel to values when vary2 is set
    SweepAnalysis analysis = SweepAnalysis::FreqInternal;
    IntegrationConfig icfg{};
    double sigma1_lo = -0.4;
    double sigma1_hi = 0.4;
    int n_points = 81;
    Variable variable = Variable::Y;
    double Rload = 1.0;
    double classify_tol = kClassifyTol;
    InternalSolveOptions solve_opts{};
};

struct SweepRecord {
    double value = 0;
    double value2 = std::numeric_limits<double>::quiet_NaN();
    double peak_amplitude = std::numeric_limits<double>::quiet_NaN();
    double sigma1_at_peak = std::numeric_limits<double>::quiet_NaN();
    std::string label;          ///< response classification, when applicable
    int distinct_points = -1;
    double avg_power = std::numeric_limits<double>::quiet_NaN();
    std::string error;          ///< per-point failure note; empty on success
};

struct SweepResult {
    std::vector<SweepRecord> records;
};

namespace detail {

inline DimlessParams sweep_point_params(const SweepSpec& spec, std::size_t i) {
    if (spec.vary == "m") {
        if (!spec.physical)
            throw InvalidParameter(
                "family_sweep: sweeping m requires the physical parameter set");
        PhysicalParams p = *spec.physical;
        p.m = spec.values[i];
        return normalize(p);
    }
    DimlessParams d = spec.base;
    param_ref(d, spec.vary) = spec.values[i];
    if (!spec.vary2.empty()) param_ref(d, spec.vary2) = spec.values2[i];
    return d;
}

} // namespace detail

/// Runs the designated analysis once per grid value.  Frequency-response
/// analyses retune the point's parameter set to the matching resonance first
/// (the study protocol: tune the capacitances, then sweep sigma1).
/// Per-point errors are recorded and the sweep continues.
inline SweepResult family_sweep(const SweepSpec& spec) {
    if (spec.values.empty())
        throw InvalidParameter("family_sweep: values must be non-empty");
    if (!spec.vary2.empty() && spec.values2.size() != spec.values.size())
        throw InvalidParameter(
            "family_sweep: values2 must parallel values for a linked pair");
    if (spec.vary.empty())
        throw InvalidParameter("family_sweep: vary must name a parameter");

    SweepResult result;
    result.records.resize(spec.values.size());
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        SweepRecord& rec = result.records[i];
        rec.value = spec.values[i];
        if (!spec.vary2.empty()) rec.value2 = spec.values2[i];
        try {
            const DimlessParams d = detail::sweep_point_params(spec, i);
            switch (spec.analysis) {
                case SweepAnalysis::FreqInternal: {
                    const DimlessParams tuned =
                        retune_capacitance(d, ResonanceTarget::Internal).params;
                    const FreqRespCurve curve = freq_response_internal(
                        tuned.E, tuned, spec.sigma1_lo, spec.sigma1_hi,
                        spec.n_points, spec.solve_opts);
                    if (const FreqRespPoint* peak = curve.peak_p3()) {
                        rec.peak_amplitude = peak->p3;
                        rec.sigma1_at_peak = peak->sigma1;
                    }
                    break;
                }
                case SweepAnalysis::FreqPrimary: {
                    const DimlessParams tuned =
                        retune_capacitance(d, ResonanceTarget::Primary).params;
                    const FreqRespCurve curve = freq_response_primary(
                        tuned.E, tuned, spec.sigma1_lo, spec.sigma1_hi,
                        spec.n_points);
                    if (const FreqRespPoint* peak = curve.peak_p3()) {
                        rec.peak_amplitude = peak->p3;
                        rec.sigma1_at_peak = peak->sigma1;
                    }
                    break;
                }
                case SweepAnalysis::SimulatePoincare: {
                    const Trajectory tr = integrate(d, spec.icfg);
                    rec.peak_amplitude = amplitude(tr, spec.variable);
                    const ResponseClass rc = classify(
                        poincare(tr, d, spec.variable), spec.classify_tol);
                    rec.label = rc.to_string();
                    rec.distinct_points = rc.distinct_points;
                    rec.avg_power = average_power(tr, spec.Rload);
                    break;
                }
                case SweepAnalysis::Power: {
                    const Trajectory tr = integrate(d, spec.icfg);
                    rec.avg_power = average_power(tr, spec.Rload);
                    break;
                }
            }
        } catch (const Error& err) {
            rec.error = err.what();
        }
    }
    return result;
}

} // namespace maglev
