#pragma once

// =============================================================================
// Fixed-step RK4 integration of the normalized model
// =============================================================================
//
// The step is tied to the forcing period (dt = 2*pi / (Omega * steps_per_period))
// so that stroboscopic Poincare sampling lands exactly on grid points.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "maglev/core_model.hpp"
#include "maglev/errors.hpp"

namespace maglev {

/// Any |component| beyond this aborts the integration: the physical model is
/// bounded, so larger values signal a parameter error.
inline constexpr double kDivergenceThreshold = 1e6;

struct IntegrationConfig {
    int steps_per_period = 200;   ///< RK4 steps per forcing period (>= 32)
    int transient_periods = 400;  ///< periods integrated but not stored
    int record_periods = 100;     ///< periods kept in the trajectory
    State6 initial_state{};      ///< starting state (tau included)
};

inline void validate(const IntegrationConfig& cfg) {
    if (cfg.steps_per_period < 32)
        throw InvalidParameter("IntegrationConfig: steps_per_period must be >= 32");
    if (cfg.transient_periods < 0)
        throw InvalidParameter("IntegrationConfig: transient_periods must be >= 0");
    if (cfg.record_periods < 1)
        throw InvalidParameter("IntegrationConfig: record_periods must be >= 1");
}

/// Post-transient window of an integration, equally spaced in tau.
struct Trajectory {
    std::vector<State6> samples;
    double dt = 0;
    int steps_per_period = 0;

    int record_periods() const {
        return steps_per_period > 0
                   ? static_cast<int>((samples.size() - 1) / steps_per_period)
                   : 0;
    }
};

namespace detail {

inline State6 axpy(const State6& s, const State6& k, double h) {
    State6 r;
    r.tau = s.tau + h * k.tau;
    r.Y = s.Y + h * k.Y;
    r.dY = s.dY + h * k.dY;
    r.Q1 = s.Q1 + h * k.Q1;
    r.dQ1 = s.dQ1 + h * k.dQ1;
    r.Q2 = s.Q2 + h * k.Q2;
    r.dQ2 = s.dQ2 + h * k.dQ2;
    return r;
}

inline bool within_bounds(const State6& s) {
    return all_finite(s) && std::fabs(s.Y) < kDivergenceThreshold &&
           std::fabs(s.dY) < kDivergenceThreshold &&
           std::fabs(s.Q1) < kDivergenceThreshold &&
           std::fabs(s.dQ1) < kDivergenceThreshold &&
           std::fabs(s.Q2) < kDivergenceThreshold &&
           std::fabs(s.dQ2) < kDivergenceThreshold;
}

} // namespace detail

/// One classical four-stage RK4 update of rhs_new.
inline State6 rk4_step(const State6& s, const DimlessParams& d, double dt) {
    if (!(dt > 0)) throw InvalidParameter("rk4_step: dt must be > 0");
    const State6 k1 = rhs_new(s, d);
    const State6 k2 = rhs_new(detail::axpy(s, k1, 0.5 * dt), d);
    const State6 k3 = rhs_new(detail::axpy(s, k2, 0.5 * dt), d);
    const State6 k4 = rhs_new(detail::axpy(s, k3, dt), d);

    State6 r;
    const double w = dt / 6.0;
    r.tau = s.tau + w * (k1.tau + 2 * k2.tau + 2 * k3.tau + k4.tau);
    r.Y = s.Y + w * (k1.Y + 2 * k2.Y + 2 * k3.Y + k4.Y);
    r.dY = s.dY + w * (k1.dY + 2 * k2.dY + 2 * k3.dY + k4.dY);
    r.Q1 = s.Q1 + w * (k1.Q1 + 2 * k2.Q1 + 2 * k3.Q1 + k4.Q1);
    r.dQ1 = s.dQ1 + w * (k1.dQ1 + 2 * k2.dQ1 + 2 * k3.dQ1 + k4.dQ1);
    r.Q2 = s.Q2 + w * (k1.Q2 + 2 * k2.Q2 + 2 * k3.Q2 + k4.Q2);
    r.dQ2 = s.dQ2 + w * (k1.dQ2 + 2 * k2.dQ2 + 2 * k3.dQ2 + k4.dQ2);
    if (!detail::within_bounds(r))
        throw OverflowError("integration diverged at tau = " +
                                std::to_string(r.tau), r.tau);
    return r;
}

/// Integrates through the transient and returns only the recorded window
/// (record_periods * steps_per_period + 1 samples).
inline Trajectory integrate(const DimlessParams& d, const IntegrationConfig& cfg = {}) {
    validate(d);
    validate(cfg);
    if (!(d.Omega > 0))
        throw InvalidParameter("integrate: Omega must be > 0 to define the period");

    const double dt = 2.0 * M_PI / (d.Omega * cfg.steps_per_period);
    const std::size_t n_transient =
        static_cast<std::size_t>(cfg.transient_periods) * cfg.steps_per_period;
    const std::size_t n_record =
        static_cast<std::size_t>(cfg.record_periods) * cfg.steps_per_period;

    State6 s = cfg.initial_state;
    for (std::size_t i = 0; i < n_transient; ++i) s = rk4_step(s, d, dt);

    Trajectory tr;
    tr.dt = dt;
    tr.steps_per_period = cfg.steps_per_period;
    tr.samples.reserve(n_record + 1);
    tr.samples.push_back(s);
    for (std::size_t i = 0; i < n_record; ++i) {
        s = rk4_step(s, d, dt);
        tr.samples.push_back(s);
    }
    return tr;
}

// =============================================================================
// Energy-balance audit
// =============================================================================

/// Energy function whose exact rate of change along solutions equals the
/// dissipation plus source input (see energy_audit).
inline double audit_energy(const State6& s, const DimlessParams& d) {
    const double mech = 0.5 * s.dY * s.dY + 0.5 * s.Y * s.Y -
                        (d.W2 / 3.0) * s.Y * s.Y * s.Y +
                        (d.W3 / 4.0) * s.Y * s.Y * s.Y * s.Y;
    const double exc = (d.alpha1 / d.alpha4) *
                       (0.5 * s.dQ1 * s.dQ1 + 0.5 * d.W4 * s.Q1 * s.Q1);
    const double har = (d.alpha2 / d.beta2) *
                       (0.5 * s.dQ2 * s.dQ2 + 0.5 * d.beta3 * s.Q2 * s.Q2);
    return mech + exc + har;
}

/// Exact energy rate: dissipation in the three branches plus source input.
inline double audit_power(const State6& s, const DimlessParams& d) {
    return -d.alpha3 * s.dY * s.dY -
           (d.alpha1 * d.alpha5 / d.alpha4) * s.dQ1 * s.dQ1 -
           (d.alpha2 * d.beta1 / d.beta2) * s.dQ2 * s.dQ2 +
           (d.alpha1 / d.alpha4) * d.E * std::cos(d.Omega * s.tau) * s.dQ1;
}

/// Checks the energy balance along a trajectory: the centered finite
/// difference of audit_energy must match audit_power at every interior sample.
/// Returns the maximum residual over the window, normalized by
/// max(1, max |H|).  The finite-difference truncation error dominates, so the
/// residual shrinks ~4x when steps_per_period doubles.
inline double energy_audit(const Trajectory& tr, const DimlessParams& d) {
    if (d.alpha4 == 0 || d.beta2 == 0)
        throw InvalidParameter(
            "energy_audit: undefined for alpha4 = 0 or beta2 = 0");
    if (tr.samples.size() < 3)
        throw InvalidParameter("energy_audit: need at least 3 samples");

    std::vector<double> H(tr.samples.size());
    double h_scale = 0.0;
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
        H[k] = audit_energy(tr.samples[k], d);
        h_scale = std::max(h_scale, std::fabs(H[k]));
    }
    const double scale = std::max(1.0, h_scale);

    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < tr.samples.size(); ++k) {
        const double fd = (H[k + 1] - H[k - 1]) / (2.0 * tr.dt);
        const double balance = audit_power(tr.samples[k], d);
        worst = std::max(worst, std::fabs(fd - balance));
    }
    return worst / scale;
}

} // namespace maglev
