#pragma once

// =============================================================================
// Electromechanically coupled magnetic-levitation harvester: model equations
// =============================================================================
//
// Two models live here.  The legacy model couples the levitated magnet to the
// excitation circuit only:
//
//   m x" + m g + k1 x + k3 x^3 + S1 q1' + Cme x' = 0
//   Ls q1" - S1 x' + q1/Cs + Rs q1' = e cos(Omega_hat t)
//
// The new model adds an RLC harvesting circuit coupled back onto the magnet:
//
//   m x" + m g + k1 x + k3 x^3 + S1 q1' + S2 q2' + Cme x' = 0
//   Ls q1" - S1 x' + q1/Cs + Rs q1' = e cos(Omega_hat t)
//   Lt q2" - S2 x' + q2/Ct + Rt q2' = 0
//
// Shifting x to the static equilibrium -Y0 (k1 Y0 + k3 Y0^3 = m g) and scaling
// by (x0, q0, omega0) with omega0^2 = (3 k3 Y0^2 + k1)/m gives the normalized
// system evaluated by rhs_new():
//
//   Y"  + Y - W2 Y^2 + W3 Y^3 + a1 Q1' + a2 Q2' + a3 Y' = 0
//   Q1" - a4 Y' + W4 Q1 + a5 Q1' = E cos(Omega tau)
//   Q2" + b1 Q2' + b3 Q2 - b2 Y' = 0
//
// All types are immutable values and all operations are pure.

#include <cmath>
#include <limits>

#include "maglev/errors.hpp"

namespace maglev {

// =============================================================================
// Domain types
// =============================================================================

/// Dimensional constants of the magnets and both circuits (SI units).
struct PhysicalParams {
    double m = 0;         ///< central magnet mass [kg]
    double g = 9.81;      ///< gravity [m/s^2]
    double k1 = 0;        ///< linear magnetic stiffness [N/m]
    double k3 = 0;        ///< cubic magnetic stiffness [N/m^3]
    double S1 = 0;        ///< magnet / excitation-circuit coupling [V s/m]
    double S2 = 0;        ///< magnet / harvesting-circuit coupling [V s/m]
    double Cme = 0;       ///< combined mechanical + electrical damping [N s/m]
    double Ls = 0;        ///< excitation inductance [H]
    double Rs = 0;        ///< excitation resistance [Ohm]
    double Cs = 0;        ///< excitation capacitance [F]
    double Lt = 0;        ///< harvesting inductance [H]
    double Rt = 0;        ///< harvesting resistance [Ohm]
    double Ct = 0;        ///< harvesting capacitance [F]
    double e = 0;         ///< AC source amplitude [V]
    double Omega_hat = 0; ///< AC source angular frequency [rad/s]
    double x0 = 0;        ///< reference displacement [m]
    double q0 = 0;        ///< reference charge [C]
};

/// Normalized coefficient set of the new model.
struct DimlessParams {
    double W2 = 0;     ///< quadratic stiffness (static-offset induced)
    double W3 = 0;     ///< cubic stiffness
    double W4 = 0;     ///< squared excitation-circuit natural frequency
    double alpha1 = 0; ///< Q1' back-action on the magnet
    double alpha2 = 0; ///< Q2' back-action on the magnet
    double alpha3 = 0; ///< mechanical + electrical damping
    double alpha4 = 0; ///< Y' drive of the excitation circuit
    double alpha5 = 0; ///< excitation-circuit damping
    double beta1 = 0;  ///< harvesting-circuit damping
    double beta2 = 0;  ///< Y' drive of the harvesting circuit
    double beta3 = 0;  ///< squared harvesting-circuit natural frequency
    double E = 0;      ///< normalized source amplitude
    double Omega = 0;  ///< normalized forcing frequency
};

/// Instantaneous state of the normalized new model at time tau.
struct State6 {
    double tau = 0;
    double Y = 0;
    double dY = 0;
    double Q1 = 0;
    double dQ1 = 0;
    double Q2 = 0;
    double dQ2 = 0;
};

/// Instantaneous state of the dimensional legacy model at time t.
struct StateLegacy {
    double t = 0;
    double x = 0;
    double dx = 0;
    double q1 = 0;
    double dq1 = 0;
};

inline bool all_finite(const State6& s) {
    return std::isfinite(s.tau) && std::isfinite(s.Y) && std::isfinite(s.dY) &&
           std::isfinite(s.Q1) && std::isfinite(s.dQ1) &&
           std::isfinite(s.Q2) && std::isfinite(s.dQ2);
}

inline bool all_finite(const StateLegacy& s) {
    return std::isfinite(s.t) && std::isfinite(s.x) && std::isfinite(s.dx) &&
           std::isfinite(s.q1) && std::isfinite(s.dq1);
}

/// Throws InvalidParameter unless the PhysicalParams invariants hold.
inline void validate(const PhysicalParams& p) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InvalidParameter(what);
    };
    require(p.m > 0, "PhysicalParams: m must be > 0");
    require(p.Ls > 0, "PhysicalParams: Ls must be > 0");
    require(p.Lt > 0, "PhysicalParams: Lt must be > 0");
    require(p.Cs > 0, "PhysicalParams: Cs must be > 0");
    require(p.Ct > 0, "PhysicalParams: Ct must be > 0");
    require(p.x0 > 0, "PhysicalParams: x0 must be > 0");
    require(p.q0 > 0, "PhysicalParams: q0 must be > 0");
    require(p.k1 > 0, "PhysicalParams: k1 must be > 0");
    require(p.k3 > 0, "PhysicalParams: k3 must be > 0");
}

/// Throws InvalidParameter unless the DimlessParams invariants hold.
inline void validate(const DimlessParams& d) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InvalidParameter(what);
    };
    for (double v : {d.W2, d.W3, d.W4, d.alpha1, d.alpha2, d.alpha3, d.alpha4,
                     d.alpha5, d.beta1, d.beta2, d.beta3, d.E, d.Omega})
        require(std::isfinite(v), "DimlessParams: all fields must be finite");
    require(d.W4 > 0, "DimlessParams: W4 must be > 0");
    require(d.beta3 > 0, "DimlessParams: beta3 must be > 0");
    require(d.alpha3 >= 0, "DimlessParams: alpha3 must be >= 0");
    require(d.alpha5 >= 0, "DimlessParams: alpha5 must be >= 0");
    require(d.beta1 >= 0, "DimlessParams: beta1 must be >= 0");
}

// =============================================================================
// Static offset and nondimensionalization
// =============================================================================

/// Static equilibrium offset Y0: the unique real root of
/// k1 Y0 + k3 Y0^3 = m g.  The left side is strictly increasing, so a
/// bracketed bisection on [0, mg/k1 + (mg/k3)^(1/3)] always converges; three
/// Newton steps polish the root to full precision.
inline double solve_static_offset(double m, double g, double k1, double k3) {
    if (!(k1 > 0) || !(k3 > 0))
        throw InvalidParameter("solve_static_offset: k1 and k3 must be > 0");
    if (!(m >= 0) || !(g > 0))
        throw InvalidParameter("solve_static_offset: need m >= 0 and g > 0");

    const double mg = m * g;
    if (mg == 0) return 0.0;

    auto f = [&](double y) { return k1 * y + k3 * y * y * y - mg; };

    double lo = 0.0;
    double hi = mg / k1 + std::cbrt(mg / k3);
    for (int i = 0; i < 200 && (hi - lo) > 1e-16 * hi; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < 0 ? lo : hi) = mid;
    }
    double y = 0.5 * (lo + hi);
    for (int i = 0; i < 3; ++i) {
        double deriv = k1 + 3 * k3 * y * y;
        y -= f(y) / deriv;
    }
    return y;
}

/// Natural frequency of the magnet linearized about the static offset:
/// omega0^2 = (3 k3 Y0^2 + k1) / m.
inline double natural_frequency(const PhysicalParams& p) {
    validate(p);
    const double y0 = solve_static_offset(p.m, p.g, p.k1, p.k3);
    return std::sqrt((3 * p.k3 * y0 * y0 + p.k1) / p.m);
}

/// Maps dimensional constants onto the normalized coefficient set.
inline DimlessParams normalize(const PhysicalParams& p) {
    validate(p);
    const double y0 = solve_static_offset(p.m, p.g, p.k1, p.k3);
    const double w0sq = (3 * p.k3 * y0 * y0 + p.k1) / p.m;
    const double w0 = std::sqrt(w0sq);

    DimlessParams d;
    d.W2 = 3 * p.k3 * y0 * p.x0 / (p.m * w0sq);
    d.W3 = p.k3 * p.x0 * p.x0 / (p.m * w0sq);
    d.W4 = 1.0 / (w0sq * p.Ls * p.Cs);
    d.alpha1 = p.S1 * p.q0 / (p.m * w0 * p.x0);
    d.alpha2 = p.S2 * p.q0 / (p.m * w0 * p.x0);
    d.alpha3 = p.Cme / (p.m * w0);
    d.alpha4 = p.S1 * p.x0 / (p.Ls * w0 * p.q0);
    d.alpha5 = p.Rs / (p.Ls * w0);
    d.beta1 = p.Rt / (p.Lt * w0);
    d.beta2 = p.S2 * p.x0 / (p.Lt * w0 * p.q0);
    d.beta3 = 1.0 / (w0sq * p.Lt * p.Ct);
    d.E = p.e / (p.Ls * w0sq * p.q0);
    d.Omega = p.Omega_hat / w0;
    validate(d);
    return d;
}

// =============================================================================
// Right-hand sides
// =============================================================================

/// Time derivative of the normalized new model at state s.
inline State6 rhs_new(const State6& s, const DimlessParams& d) {
    State6 r;
    r.tau = 1.0;
    r.Y = s.dY;
    r.dY = -s.Y + d.W2 * s.Y * s.Y - d.W3 * s.Y * s.Y * s.Y -
           d.alpha1 * s.dQ1 - d.alpha2 * s.dQ2 - d.alpha3 * s.dY;
    r.Q1 = s.dQ1;
    r.dQ1 = d.E * std::cos(d.Omega * s.tau) + d.alpha4 * s.dY -
            d.W4 * s.Q1 - d.alpha5 * s.dQ1;
    r.Q2 = s.dQ2;
    r.dQ2 = d.beta2 * s.dY - d.beta1 * s.dQ2 - d.beta3 * s.Q2;
    return r;
}

/// Time derivative of the dimensional legacy model at state s.
inline StateLegacy rhs_legacy(const StateLegacy& s, const PhysicalParams& p) {
    StateLegacy r;
    r.t = 1.0;
    r.x = s.dx;
    r.dx = -(p.m * p.g + p.k1 * s.x + p.k3 * s.x * s.x * s.x +
             p.S1 * s.dq1 + p.Cme * s.dx) / p.m;
    r.q1 = s.dq1;
    r.dq1 = (p.e * std::cos(p.Omega_hat * s.t) + p.S1 * s.dx -
             s.q1 / p.Cs - p.Rs * s.dq1) / p.Ls;
    return r;
}

// =============================================================================
// Instantaneous power
// =============================================================================

/// New-model harvested power Rload * Q2'^2.  Absolute powers in the model are
/// known only up to the load resistance, so Rload defaults to 1 and power
/// comparisons should use ratios in which it cancels.
inline double power_new(const State6& s, double Rload = 1.0) {
    if (!(Rload > 0)) throw InvalidParameter("power_new: Rload must be > 0");
    return Rload * s.dQ2 * s.dQ2;
}

/// Legacy-model harvested power ((ce/alpha_em) x')^2 * Rload.
inline double power_legacy(const StateLegacy& s, double ce, double alpha_em,
                           double Rload = 1.0) {
    if (alpha_em == 0)
        throw InvalidParameter("power_legacy: alpha_em must be nonzero");
    if (!(Rload > 0)) throw InvalidParameter("power_legacy: Rload must be > 0");
    const double i = (ce / alpha_em) * s.dx;
    return i * i * Rload;
}

} // namespace maglev
