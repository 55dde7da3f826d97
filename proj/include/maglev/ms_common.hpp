#pragma once

// Shared pieces of the two multiple-scales reductions.

#include <cmath>
#include <vector>

#include "maglev/core_model.hpp"

namespace maglev {

/// Polar amplitudes at or below this are treated as a singular chart.
inline constexpr double kChartFloor = 1e-9;

/// Wraps an angle to (-pi, pi].
inline double wrap_phase(double x) {
    double r = std::remainder(x, 2.0 * M_PI);
    if (r <= -M_PI) r = M_PI;
    return r;
}

/// Detuning set of the internal-resonance reduction (epsilon reconstituted
/// to 1): sigma1 = Omega - sqrt(W4), sigma2 = sqrt(W4) - 1,
/// sigma3 = sqrt(beta3) - 1.
struct InternalDetuning {
    double sigma1 = 0;
    double sigma2 = 0;
    double sigma3 = 0;

    static InternalDetuning from_params(const DimlessParams& d) {
        InternalDetuning det;
        det.sigma1 = d.Omega - std::sqrt(d.W4);
        det.sigma2 = std::sqrt(d.W4) - 1.0;
        det.sigma3 = std::sqrt(d.beta3) - 1.0;
        return det;
    }
};

/// Detuning set of the primary-resonance reduction: sigma1 = Omega - sqrt(W4),
/// sigma4 = sqrt(W4) - sqrt(beta3).
struct PrimaryDetuning {
    double sigma1 = 0;
    double sigma4 = 0;

    static PrimaryDetuning from_params(const DimlessParams& d) {
        PrimaryDetuning det;
        det.sigma1 = d.Omega - std::sqrt(d.W4);
        det.sigma4 = std::sqrt(d.W4) - std::sqrt(d.beta3);
        return det;
    }
};

/// One equilibrium on a frequency-response curve.
struct FreqRespPoint {
    double sigma1 = 0;
    double p1 = 0;
    double p2 = 0;
    double p3 = 0;
    bool stable = false;
};

/// Frequency-response curve: all equilibria over a sigma1 grid, sorted by
/// sigma1 then p1.  Grid values with no equilibrium contribute no points.
struct FreqRespCurve {
    std::vector<double> grid;
    std::vector<FreqRespPoint> points;

    /// Point with the largest p3 (the harvested-charge amplitude).
    const FreqRespPoint* peak_p3() const {
        const FreqRespPoint* best = nullptr;
        for (const auto& p : points)
            if (!best || p.p3 > best->p3) best = &p;
        return best;
    }
};

} // namespace maglev
