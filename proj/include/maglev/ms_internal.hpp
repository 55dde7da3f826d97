#pragma once

// =============================================================================
// Internal-resonance multiple-scales reduction
// =============================================================================
//
// Slow flow in polar coordinates (p1, gamma1, p2, gamma2, p3, gamma3), with
// S = sqrt(W4), B = sqrt(beta3):
//
//   2 p1'                    = -a1 S p2 cos g1 - a2 B p3 cos g3 - a3 p1
//   2 p1 (g1' + g2')         =  2 p1 (s1+s2) + a1 S p2 sin g1
//                              + a2 B p3 sin g3 - (3/4) W3 p1^3
//   2 S p2'                  =  a4 p1 cos g1 - a5 S p2 + E sin g2
//   2 S p2 g2'               =  a4 p1 sin g1 + 2 S p2 s1 + E cos g2
//   2 B p3'                  = -b1 B p3 + b2 p1 cos g3
//   2 B p3 (g3' - g1' - g2') = -2 B p3 (s1+s2-s3) - b2 p1 sin g3
//
// Equilibria follow a closed-form chain: p3 and p2 are explicit in p1, and the
// remaining amplitude equation E^2(p1) = E^2 is scalar, solved by a scan plus
// bisection.  Phases are recovered from the equilibrium sine/cosine pairs.

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

/// Polar slow-flow state of the internal-resonance reduction.
struct SlowStateInternal {
    double p1 = 0;
    double gamma1 = 0;
    double p2 = 0;
    double gamma2 = 0;
    double p3 = 0;
    double gamma3 = 0;
};

/// Equilibrium with its linearization attached.
struct EquilibriumInternal {
    SlowStateInternal state;
    bool stable = false;
    std::array<std::complex<double>, 6> eigenvalues{};
    double residual = 0; ///< max |slow-flow rate| at the state
};

/// Result of an equilibrium search over one detuning.
struct InternalEquilibria {
    std::vector<EquilibriumInternal> points;
    int chart_skips = 0; ///< roots dropped because an amplitude hit the floor
};

/// Search controls for solve_equilibria_internal.
struct InternalSolveOptions {
    double p1_max = 3.0;
    int scan_points = 2000;
};

// =============================================================================
// Slow flow and Jacobian
// =============================================================================

/// Rates of (p1, gamma1, p2, gamma2, p3, gamma3).  Valid only on the polar
/// chart: throws SingularChart when any amplitude is at or below the floor.
inline SlowStateInternal slow_rhs_internal(const SlowStateInternal& s,
                                           const DimlessParams& d,
                                           const InternalDetuning& det) {
    if (s.p1 <= kChartFloor || s.p2 <= kChartFloor || s.p3 <= kChartFloor)
        throw SingularChart("slow_rhs_internal: amplitude at or below chart floor");

    const double S = std::sqrt(d.W4);
    const double B = std::sqrt(d.beta3);
    const double s12 = det.sigma1 + det.sigma2;
    const double s123 = det.sigma1 + det.sigma2 - det.sigma3;
    const double cg1 = std::cos(s.gamma1), sg1 = std::sin(s.gamma1);
    const double cg2 = std::cos(s.gamma2), sg2 = std::sin(s.gamma2);
    const double cg3 = std::cos(s.gamma3), sg3 = std::sin(s.gamma3);

    const double p1_rate =
        0.5 * (-d.alpha1 * S * s.p2 * cg1 - d.alpha2 * B * s.p3 * cg3 -
               d.alpha3 * s.p1);
    const double p2_rate =
        (d.alpha4 * s.p1 * cg1 - d.alpha5 * S * s.p2 + d.E * sg2) / (2.0 * S);
    const double g2_rate =
        (d.alpha4 * s.p1 * sg1 + 2.0 * S * s.p2 * det.sigma1 + d.E * cg2) /
        (2.0 * S * s.p2);
    const double p3_rate =
        (-d.beta1 * B * s.p3 + d.beta2 * s.p1 * cg3) / (2.0 * B);
    // combined rates of (g1'+g2') and (g3'-g1'-g2') as the flow defines them
    const double g12_rate =
        s12 +
        (d.alpha1 * S * s.p2 * sg1 + d.alpha2 * B * s.p3 * sg3) / (2.0 * s.p1) -
        0.375 * d.W3 * s.p1 * s.p1;
    const double g312_rate =
        -s123 - d.beta2 * s.p1 * sg3 / (2.0 * B * s.p3);

    SlowStateInternal r;
    r.p1 = p1_rate;
    r.gamma1 = g12_rate - g2_rate;
    r.p2 = p2_rate;
    r.gamma2 = g2_rate;
    r.p3 = p3_rate;
    r.gamma3 = g312_rate + g12_rate;
    return r;
}

/// Analytic Jacobian of slow_rhs_internal in the state ordering
/// (p1, gamma1, p2, gamma2, p3, gamma3).
inline Matrix6 jacobian_internal(const SlowStateInternal& s,
                                 const DimlessParams& d,
                                 const InternalDetuning& det) {
    // detunings enter the rates only as additive constants, so they drop out
    // of every entry; the argument stays for interface uniformity
    (void)det;
    if (s.p1 <= kChartFloor || s.p2 <= kChartFloor || s.p3 <= kChartFloor)
        throw SingularChart("jacobian_internal: amplitude at or below chart floor");

    const double S = std::sqrt(d.W4);
    const double B = std::sqrt(d.beta3);
    const double cg1 = std::cos(s.gamma1), sg1 = std::sin(s.gamma1);
    const double cg2 = std::cos(s.gamma2), sg2 = std::sin(s.gamma2);
    const double cg3 = std::cos(s.gamma3), sg3 = std::sin(s.gamma3);
    const double p1 = s.p1, p2 = s.p2, p3 = s.p3;

    Eigen::Matrix<double, 1, 6> d_p1, d_g12, d_p2, d_g2, d_p3, d_g312;

    d_p1 << -0.5 * d.alpha3, 0.5 * d.alpha1 * S * p2 * sg1,
        -0.5 * d.alpha1 * S * cg1, 0.0, -0.5 * d.alpha2 * B * cg3,
        0.5 * d.alpha2 * B * p3 * sg3;

    d_g12 << -(d.alpha1 * S * p2 * sg1 + d.alpha2 * B * p3 * sg3) /
                     (2.0 * p1 * p1) -
                 0.75 * d.W3 * p1,
        d.alpha1 * S * p2 * cg1 / (2.0 * p1), d.alpha1 * S * sg1 / (2.0 * p1),
        0.0, d.alpha2 * B * sg3 / (2.0 * p1),
        d.alpha2 * B * p3 * cg3 / (2.0 * p1);

    d_p2 << d.alpha4 * cg1 / (2.0 * S), -d.alpha4 * p1 * sg1 / (2.0 * S),
        -0.5 * d.alpha5, d.E * cg2 / (2.0 * S), 0.0, 0.0;

    d_g2 << d.alpha4 * sg1 / (2.0 * S * p2),
        d.alpha4 * p1 * cg1 / (2.0 * S * p2),
        -(d.alpha4 * p1 * sg1 + d.E * cg2) / (2.0 * S * p2 * p2),
        -d.E * sg2 / (2.0 * S * p2), 0.0, 0.0;

    d_p3 << d.beta2 * cg3 / (2.0 * B), 0.0, 0.0, 0.0, -0.5 * d.beta1,
        -d.beta2 * p1 * sg3 / (2.0 * B);

    d_g312 << -d.beta2 * sg3 / (2.0 * B * p3), 0.0, 0.0, 0.0,
        d.beta2 * p1 * sg3 / (2.0 * B * p3 * p3),
        -d.beta2 * p1 * cg3 / (2.0 * B * p3);

    Matrix6 J;
    J.row(0) = d_p1;
    J.row(1) = d_g12 - d_g2;
    J.row(2) = d_p2;
    J.row(3) = d_g2;
    J.row(4) = d_p3;
    J.row(5) = d_g312 + d_g12;
    return J;
}

// =============================================================================
// Closed-form equilibrium chain
// =============================================================================

/// p3 = b2 p1 / sqrt(b1^2 b3 + 4 b3 (s1+s2-s3)^2).
inline double p3_of_p1(double p1, const DimlessParams& d,
                       const InternalDetuning& det) {
    if (!(d.beta3 > 0)) throw InvalidParameter("p3_of_p1: beta3 must be > 0");
    const double s123 = det.sigma1 + det.sigma2 - det.sigma3;
    const double denom_sq =
        d.beta1 * d.beta1 * d.beta3 + 4.0 * d.beta3 * s123 * s123;
    if (!(denom_sq > 0))
        throw InvalidParameter(
            "p3_of_p1: beta1 = 0 and sigma1+sigma2-sigma3 = 0 make the "
            "denominator vanish");
    return d.beta2 * p1 / std::sqrt(denom_sq);
}

/// p2 as an explicit function of (p1, p3).
inline double p2_of(double p1, double p3, const DimlessParams& d,
                    const InternalDetuning& det) {
    if (!(p1 > 0)) throw SingularChart("p2_of: p1 must be > 0");
    const double s12 = det.sigma1 + det.sigma2;
    const double s123 = det.sigma1 + det.sigma2 - det.sigma3;
    const double t1 = d.alpha2 * d.beta1 * d.beta3 * p3 * p3 +
                      d.alpha3 * d.beta2 * p1 * p1;
    const double t2 =
        d.alpha2 * d.beta3 * p3 * p3 * s123 -
        d.beta2 * p1 * p1 * (s12 - 0.375 * d.W3 * p1 * p1);
    return std::sqrt(t1 * t1 + 4.0 * t2 * t2) /
           (d.beta2 * p1 * d.alpha1 * std::sqrt(d.W4));
}

/// Squared excitation amplitude required to hold an equilibrium at p1.
inline double E2_of_p1(double p1, const DimlessParams& d,
                       const InternalDetuning& det) {
    const double p3 = p3_of_p1(p1, d, det);
    const double p2 = p2_of(p1, p3, d, det);
    const double s12 = det.sigma1 + det.sigma2;
    const double s123 = det.sigma1 + det.sigma2 - det.sigma3;
    const double s1 = det.sigma1;
    return d.alpha5 * d.alpha5 * p2 * p2 * d.W4 +
           d.alpha4 * d.alpha4 * p1 * p1 +
           4.0 * s1 * s1 * d.W4 * p2 * p2 +
           (2.0 * d.alpha4 / (d.alpha1 * d.beta2)) *
               (d.alpha5 * d.alpha2 * d.beta1 * d.beta3 * p3 * p3 +
                d.alpha5 * d.alpha3 * d.beta2 * p1 * p1 +
                4.0 * s1 * d.alpha2 * p3 * p3 * d.beta3 * s123 -
                4.0 * s1 * d.beta2 * p1 * p1 *
                    (s12 - 0.375 * d.W3 * p1 * p1));
}

namespace detail {

/// Builds the full equilibrium (phases, Jacobian, stability) from a root p1 of
/// E2_of_p1 = E^2.  Phases come from the equilibrium sine/cosine pairs via
/// two-argument arctangent.
inline EquilibriumInternal equilibrium_from_p1(double p1, double E,
                                               const DimlessParams& d,
                                               const InternalDetuning& det) {
    const double S = std::sqrt(d.W4);
    const double B = std::sqrt(d.beta3);
    const double s12 = det.sigma1 + det.sigma2;
    const double s123 = det.sigma1 + det.sigma2 - det.sigma3;

    EquilibriumInternal eq;
    eq.state.p1 = p1;
    eq.state.p3 = p3_of_p1(p1, d, det);
    eq.state.p2 = p2_of(p1, eq.state.p3, d, det);

    const double cg3 = d.beta1 * B * eq.state.p3 / (d.beta2 * p1);
    const double sg3 = -2.0 * eq.state.p3 * B * s123 / (d.beta2 * p1);
    eq.state.gamma3 = wrap_phase(std::atan2(sg3, cg3));

    const double denom = d.beta2 * p1 * d.alpha1 * S * eq.state.p2;
    const double cg1 = -(d.alpha2 * d.beta1 * d.beta3 * eq.state.p3 * eq.state.p3 +
                         d.alpha3 * d.beta2 * p1 * p1) /
                       denom;
    const double sg1 = (2.0 * d.alpha2 * d.beta3 * eq.state.p3 * eq.state.p3 * s123 -
                        2.0 * d.beta2 * p1 * p1 *
                            (s12 - 0.375 * d.W3 * p1 * p1)) /
                       denom;
    eq.state.gamma1 = wrap_phase(std::atan2(sg1, cg1));

    const double e_sg2 = d.alpha5 * S * eq.state.p2 - d.alpha4 * p1 * cg1;
    const double e_cg2 = -d.alpha4 * p1 * sg1 - 2.0 * S * eq.state.p2 * det.sigma1;
    eq.state.gamma2 = wrap_phase(std::atan2(e_sg2, e_cg2));

    DimlessParams dd = d;
    dd.E = E;
    const SlowStateInternal rate = slow_rhs_internal(eq.state, dd, det);
    eq.residual = std::max({std::fabs(rate.p1), std::fabs(rate.gamma1),
                            std::fabs(rate.p2), std::fabs(rate.gamma2),
                            std::fabs(rate.p3), std::fabs(rate.gamma3)});

    const Matrix6 J = jacobian_internal(eq.state, dd, det);
    eq.eigenvalues = eigenvalues<6>(J);
    eq.stable = all_stable(eq.eigenvalues);
    return eq;
}

} // namespace detail

/// Finds every equilibrium at excitation E: scans p1 over (0, p1_max],
/// brackets sign changes of E2_of_p1(p1) - E^2 and refines each by bisection.
/// An empty result means no response in range (not an error).
inline InternalEquilibria solve_equilibria_internal(
    double E, const DimlessParams& d, const InternalDetuning& det,
    const InternalSolveOptions& opt = {}) {
    if (!(E > 0)) throw InvalidParameter("solve_equilibria_internal: E must be > 0");
    if (opt.scan_points < 2 || !(opt.p1_max > 0))
        throw InvalidParameter("solve_equilibria_internal: bad search options");

    const double target = E * E;
    auto f = [&](double p) { return E2_of_p1(p, d, det) - target; };

    InternalEquilibria out;
    const double step = opt.p1_max / opt.scan_points;
    double prev_p = 0.0;
    double prev_f = -target; // E^2(p1) -> 0 as p1 -> 0+
    for (int i = 1; i <= opt.scan_points; ++i) {
        const double p = i * step;
        const double fp = f(p);
        if ((prev_f < 0 && fp >= 0) || (prev_f >= 0 && fp < 0)) {
            double lo = prev_p > 0 ? prev_p : step * 1e-6;
            double hi = p;
            double flo = prev_p > 0 ? prev_f : f(lo);
            if ((flo < 0) != (f(hi) < 0)) {
                for (int it = 0; it < 100 && (hi - lo) > 1e-15 * hi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if ((f(mid) < 0) == (flo < 0)) {
                        lo = mid;
                        flo = f(mid);
                    } else {
                        hi = mid;
                    }
                }
                const double root = 0.5 * (lo + hi);
                EquilibriumInternal eq = detail::equilibrium_from_p1(root, E, d, det);
                if (eq.state.p2 <= kChartFloor || eq.state.p3 <= kChartFloor ||
                    eq.residual >= 1e-10)
                    ++out.chart_skips;
                else
                    out.points.push_back(eq);
            }
        }
        prev_p = p;
        prev_f = fp;
    }
    return out;
}

/// Frequency-response curve over a sigma1 grid (sigma2, sigma3 fixed by the
/// parameter set).  Grid points evaluate independently and in parallel.
inline FreqRespCurve freq_response_internal(double E, const DimlessParams& d,
                                            double sigma1_lo, double sigma1_hi,
                                            int n_points,
                                            const InternalSolveOptions& opt = {}) {
    if (n_points < 2)
        throw InvalidParameter("freq_response_internal: n_points must be >= 2");

    FreqRespCurve curve;
    curve.grid.resize(n_points);
    for (int i = 0; i < n_points; ++i)
        curve.grid[i] =
            sigma1_lo + (sigma1_hi - sigma1_lo) * i / (n_points - 1);

    std::vector<std::vector<FreqRespPoint>> slots(n_points);
    parallel_for(n_points, [&](std::size_t i) {
        InternalDetuning det = InternalDetuning::from_params(d);
        det.sigma1 = curve.grid[i];
        const InternalEquilibria eqs = solve_equilibria_internal(E, d, det, opt);
        for (const auto& eq : eqs.points)
            slots[i].push_back({curve.grid[i], eq.state.p1, eq.state.p2,
                                eq.state.p3, eq.stable});
    });
    for (auto& slot : slots)
        curve.points.insert(curve.points.end(), slot.begin(), slot.end());
    return curve;
}

} // namespace maglev
