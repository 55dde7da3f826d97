#pragma once

// =============================================================================
// Primary-resonance multiple-scales reduction (second order)
// =============================================================================
//
// Valid when the circuit frequencies sqrt(W4) and sqrt(beta3) are well
// separated from the mechanical frequency 1; W4 -> 1 or beta3 -> 1 raises
// ResonantDenominator (use the internal-resonance analysis there).
//
// Slow flow in (p1, p2, gamma2, p3, gamma1), S = sqrt(W4), B = sqrt(beta3):
//
//   2 p1'               = -a3 p1
//   2 S p2'             =  c3 p3 sin g1 - a5 S p2 + E sin g2
//   2 S p2 g2'          = -c3 p3 cos g1 + 2 S p2 s1 - k2 p2 + E cos g2
//   2 B p3'             = -b1 B p3 - c5 p2 sin g1
//   2 B p3 (g1' + g2')  =  2 B p3 (s1+s4) - c6 p3 - c5 p2 cos g1
//
// with c3 = a2 a4 b3/(b3-1), c5 = a1 b2 W4/(W4-1), c6 = a2 b2 b3/(b3-1) and
// k2 = a1 a4 W4/(W4-1).  The equilibrium has p1 = 0 and closes in p2, p3.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "maglev/core_model.hpp"
#include "maglev/errors.hpp"
#include "maglev/ms_common.hpp"
#include "maglev/parallel.hpp"
#include "maglev/stability.hpp"

namespace maglev {

/// Polar slow-flow state of the primary-resonance reduction.
struct SlowStatePrimary {
    double p1 = 0;
    double p2 = 0;
    double gamma2 = 0;
    double p3 = 0;
    double gamma1 = 0;
};

/// Rates of (p1, p2, gamma2, p3, gamma1).
struct SlowRatePrimary {
    double p1 = 0;
    double p2 = 0;
    double gamma2 = 0;
    double p3 = 0;
    double gamma1 = 0;
};

/// Equilibrium of the primary-resonance slow flow (p1 is identically 0 there,
/// and the phase of the decayed mode is indeterminate and omitted).
struct EquilibriumPrimary {
    double p2 = 0;
    double p3 = 0;
    double gamma1 = 0;
    double gamma2 = 0;
    bool stable = false;
    std::array<std::complex<double>, 4> eigenvalues{};
    double residual = 0;
};

namespace detail {

inline void check_nonresonant(const DimlessParams& d) {
    if (std::fabs(d.W4 - 1.0) < 1e-9 * std::max(1.0, d.W4) ||
        std::fabs(d.beta3 - 1.0) < 1e-9 * std::max(1.0, d.beta3))
        throw ResonantDenominator(
            "primary-resonance reduction is singular for W4 = 1 or beta3 = 1; "
            "use the internal-resonance analysis");
}

struct PrimaryCoeffs {
    double S, B, c3, c5, c6, k2;
    explicit PrimaryCoeffs(const DimlessParams& d)
        : S(std::sqrt(d.W4)), B(std::sqrt(d.beta3)),
          c3(d.alpha2 * d.alpha4 * d.beta3 / (d.beta3 - 1.0)),
          c5(d.alpha1 * d.beta2 * d.W4 / (d.W4 - 1.0)),
          c6(d.alpha2 * d.beta2 * d.beta3 / (d.beta3 - 1.0)),
          k2(d.alpha1 * d.alpha4 * d.W4 / (d.W4 - 1.0)) {}
};

} // namespace detail

// =============================================================================
// Slow flow and Jacobian
// =============================================================================

/// Rates of the primary-resonance slow flow.  p1 decays as -a3 p1 / 2
/// regardless of the couplings; the phase rows require p2, p3 above the floor.
inline SlowRatePrimary slow_rhs_primary(const SlowStatePrimary& s,
                                        const DimlessParams& d,
                                        const PrimaryDetuning& det) {
    detail::check_nonresonant(d);
    if (s.p2 <= kChartFloor || s.p3 <= kChartFloor)
        throw SingularChart("slow_rhs_primary: amplitude at or below chart floor");

    const detail::PrimaryCoeffs c(d);
    const double cg1 = std::cos(s.gamma1), sg1 = std::sin(s.gamma1);
    const double cg2 = std::cos(s.gamma2), sg2 = std::sin(s.gamma2);

    SlowRatePrimary r;
    r.p1 = -0.5 * d.alpha3 * s.p1;
    r.p2 = (c.c3 * s.p3 * sg1 - d.alpha5 * c.S * s.p2 + d.E * sg2) / (2.0 * c.S);
    r.gamma2 = (-c.c3 * s.p3 * cg1 + d.E * cg2) / (2.0 * c.S * s.p2) +
               det.sigma1 - c.k2 / (2.0 * c.S);
    r.p3 = (-d.beta1 * c.B * s.p3 - c.c5 * s.p2 * sg1) / (2.0 * c.B);
    const double g12_rate = (det.sigma1 + det.sigma4) - c.c6 / (2.0 * c.B) -
                            c.c5 * s.p2 * cg1 / (2.0 * c.B * s.p3);
    r.gamma1 = g12_rate - r.gamma2;
    return r;
}

/// Analytic Jacobian of the (p2, gamma2, p3, gamma1) block of the slow flow.
inline Matrix4 jacobian_primary(const SlowStatePrimary& s,
                                const DimlessParams& d,
                                const PrimaryDetuning& det) {
    detail::check_nonresonant(d);
    (void)det;
    if (s.p2 <= kChartFloor || s.p3 <= kChartFloor)
        throw SingularChart("jacobian_primary: amplitude at or below chart floor");

    const detail::PrimaryCoeffs c(d);
    const double cg1 = std::cos(s.gamma1), sg1 = std::sin(s.gamma1);
    const double cg2 = std::cos(s.gamma2), sg2 = std::sin(s.gamma2);
    const double p2 = s.p2, p3 = s.p3;

    Eigen::Matrix<double, 1, 4> d_p2, d_g2, d_p3, d_g12;

    d_p2 << -0.5 * d.alpha5, d.E * cg2 / (2.0 * c.S), c.c3 * sg1 / (2.0 * c.S),
        c.c3 * p3 * cg1 / (2.0 * c.S);

    d_g2 << (c.c3 * p3 * cg1 - d.E * cg2) / (2.0 * c.S * p2 * p2),
        -d.E * sg2 / (2.0 * c.S * p2), -c.c3 * cg1 / (2.0 * c.S * p2),
        c.c3 * p3 * sg1 / (2.0 * c.S * p2);

    d_p3 << -c.c5 * sg1 / (2.0 * c.B), 0.0, -0.5 * d.beta1,
        -c.c5 * p2 * cg1 / (2.0 * c.B);

    d_g12 << -c.c5 * cg1 / (2.0 * c.B * p3), 0.0,
        c.c5 * p2 * cg1 / (2.0 * c.B * p3 * p3),
        c.c5 * p2 * sg1 / (2.0 * c.B * p3);

    Matrix4 J;
    J.row(0) = d_p2;
    J.row(1) = d_g2;
    J.row(2) = d_p3;
    J.row(3) = d_g12 - d_g2;
    return J;
}

// =============================================================================
// Closed-form equilibrium
// =============================================================================

/// Equilibrium amplitude ratio: p3 = c(p2) with
/// c = a1 b2 W4 / (|W4-1| sqrt(b1^2 b3 + (2 B (s1+s4) - a2 b2 b3/(b3-1))^2)).
inline double p3_of_p2(double p2, const DimlessParams& d,
                       const PrimaryDetuning& det) {
    detail::check_nonresonant(d);
    const double B = std::sqrt(d.beta3);
    const double inner = 2.0 * B * (det.sigma1 + det.sigma4) -
                         d.alpha2 * d.beta2 * d.beta3 / (d.beta3 - 1.0);
    const double denom = std::fabs(d.W4 - 1.0) *
                         std::sqrt(d.beta1 * d.beta1 * d.beta3 + inner * inner);
    return d.alpha1 * d.beta2 * d.W4 * p2 / denom;
}

/// Unique equilibrium at excitation E.  p3/p2 is fixed by p3_of_p2, which
/// makes the amplitude equation linear in p2: p2 = E / sqrt(a^2 + b^2).
inline EquilibriumPrimary solve_equilibrium_primary(double E,
                                                    const DimlessParams& d,
                                                    const PrimaryDetuning& det) {
    detail::check_nonresonant(d);
    if (!(E > 0))
        throw InvalidParameter("solve_equilibrium_primary: E must be > 0");

    const detail::PrimaryCoeffs c(d);
    const double r = p3_of_p2(1.0, d, det); // p3 = r * p2

    const double a = d.alpha5 * c.S + (c.c3 / c.c5) * d.beta1 * c.B * r * r;
    const double b = 2.0 * c.S * det.sigma1 - c.k2 -
                     (c.c3 / c.c5) *
                         (2.0 * c.B * (det.sigma1 + det.sigma4) - c.c6) * r * r;

    EquilibriumPrimary eq;
    eq.p2 = E / std::sqrt(a * a + b * b);
    eq.p3 = r * eq.p2;

    const double sg1 = -d.beta1 * c.B * eq.p3 / (c.c5 * eq.p2);
    const double cg1 = (2.0 * c.B * (det.sigma1 + det.sigma4) - c.c6) * eq.p3 /
                       (c.c5 * eq.p2);
    eq.gamma1 = wrap_phase(std::atan2(sg1, cg1));
    eq.gamma2 = wrap_phase(std::atan2(a * eq.p2, -b * eq.p2));

    SlowStatePrimary st;
    st.p1 = 0.0;
    st.p2 = eq.p2;
    st.gamma2 = eq.gamma2;
    st.p3 = eq.p3;
    st.gamma1 = eq.gamma1;
    DimlessParams dd = d;
    dd.E = E;
    const SlowRatePrimary rate = slow_rhs_primary(st, dd, det);
    eq.residual = std::max({std::fabs(rate.p2), std::fabs(rate.gamma2),
                            std::fabs(rate.p3), std::fabs(rate.gamma1)});

    const Matrix4 J = jacobian_primary(st, dd, det);
    eq.eigenvalues = eigenvalues<4>(J);
    eq.stable = all_stable(eq.eigenvalues);
    return eq;
}

// =============================================================================
// First-order correction fields
// =============================================================================

/// O(eps) correction coefficients for reconstructing time-domain responses
/// from the slow amplitudes A1, A2, A3 (each A = p/2 * exp(i q)):
///
///   v0(T0) = v0_w4 e^{i sqrt(W4) T0} + v0_b3 e^{i sqrt(beta3) T0} + c.c.
///   v1(T0) = v1 e^{i T0} + c.c.,   v2(T0) = v2 e^{i T0} + c.c.
struct FirstOrderCorrections {
    std::complex<double> v0_w4;
    std::complex<double> v0_b3;
    std::complex<double> v1;
    std::complex<double> v2;
};

inline FirstOrderCorrections first_order_corrections(
    const std::complex<double>& A1, const std::complex<double>& A2,
    const std::complex<double>& A3, const DimlessParams& d) {
    detail::check_nonresonant(d);
    const std::complex<double> i(0.0, 1.0);
    FirstOrderCorrections fc;
    fc.v0_w4 = i * d.alpha1 * std::sqrt(d.W4) * A2 / (d.W4 - 1.0);
    fc.v0_b3 = i * d.alpha2 * std::sqrt(d.beta3) * A3 / (d.beta3 - 1.0);
    fc.v1 = i * d.alpha4 * A1 / (d.W4 - 1.0);
    fc.v2 = i * d.beta2 * A1 / (d.beta3 - 1.0);
    return fc;
}

/// Reconstructed steady amplitudes of (Y, Q1, Q2) at a primary-resonance
/// equilibrium.  Q1 and Q2 are carried by the leading-order modes (p2, p3);
/// Y appears only through the first-order correction v0.
struct ReconstructedAmplitudes {
    double Y = 0;
    double Q1 = 0;
    double Q2 = 0;
};

inline ReconstructedAmplitudes reconstructed_amplitudes(
    const EquilibriumPrimary& eq, const DimlessParams& d,
    const PrimaryDetuning& det) {
    const std::complex<double> i(0.0, 1.0);
    // Phase reference at slow time zero: q2 = -gamma2, q3 = q2 - gamma1.
    const double q2 = -eq.gamma2;
    const double q3 = q2 - eq.gamma1;
    const std::complex<double> A2 = 0.5 * eq.p2 * std::exp(i * q2);
    const std::complex<double> A3 = 0.5 * eq.p3 * std::exp(i * q3);
    const FirstOrderCorrections fc = first_order_corrections(0.0, A2, A3, d);

    ReconstructedAmplitudes amp;
    amp.Q1 = eq.p2;
    amp.Q2 = eq.p3;

    const double wS = std::sqrt(d.W4);
    const double wB = std::sqrt(d.beta3);
    if (std::fabs(wS - wB) < 1e-9) {
        amp.Y = 2.0 * std::abs(fc.v0_w4 + fc.v0_b3);
    } else {
        // Two-frequency sum: take the max over a dense stretch of tau.
        double peak = 0.0;
        for (int k = 0; k < 20000; ++k) {
            const double tau = k * 0.01;
            const double v =
                2.0 * (fc.v0_w4 * std::exp(i * wS * tau) +
                       fc.v0_b3 * std::exp(i * wB * tau))
                          .real();
            peak = std::max(peak, std::fabs(v));
        }
        amp.Y = peak;
    }
    (void)det;
    return amp;
}

/// Frequency-response curve over a sigma1 grid (sigma4 fixed by the params);
/// default range [-0.6, 0.6].  The closed form gives exactly one equilibrium
/// per grid point, so every point is listed with p1 = 0.
inline FreqRespCurve freq_response_primary(double E, const DimlessParams& d,
                                           double sigma1_lo = -0.6,
                                           double sigma1_hi = 0.6,
                                           int n_points = 121) {
    if (n_points < 2)
        throw InvalidParameter("freq_response_primary: n_points must be >= 2");
    detail::check_nonresonant(d);

    FreqRespCurve curve;
    curve.grid.resize(n_points);
    for (int i = 0; i < n_points; ++i)
        curve.grid[i] =
            sigma1_lo + (sigma1_hi - sigma1_lo) * i / (n_points - 1);

    curve.points.resize(n_points);
    parallel_for(n_points, [&](std::size_t i) {
        PrimaryDetuning det = PrimaryDetuning::from_params(d);
        det.sigma1 = curve.grid[i];
        const EquilibriumPrimary eq = solve_equilibrium_primary(E, d, det);
        curve.points[i] = {curve.grid[i], 0.0, eq.p2, eq.p3, eq.stable};
    });
    return curve;
}

} // namespace maglev
