#include <catch2/catch.hpp>

#include <random>

#include "maglev/core_model.hpp"
#include "oracles.hpp"

using namespace maglev;

TEST_CASE("static offset: zero load sits at the origin", "[core_model]") {
    REQUIRE(solve_static_offset(0.0, 9.81, 1.0, 1.0) == 0.0);
}

TEST_CASE("static offset: linear-spring limit", "[core_model]") {
    const double y0 = solve_static_offset(1.0, 10.0, 10.0, 1e-12);
    REQUIRE(y0 == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("static offset matches an independent bisection", "[core_model]") {
    const double y0 = solve_static_offset(0.1, 9.81, 25.0, 1e4);
    const double ref = oracles::static_offset_bisection(0.1, 9.81, 25.0, 1e4);
    REQUIRE(y0 == Approx(ref).margin(1e-12));
}

TEST_CASE("static offset residual over random parameter draws", "[core_model]") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> ue(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const double m = std::pow(10.0, ue(rng));
        const double k1 = std::pow(10.0, ue(rng));
        const double k3 = std::pow(10.0, ue(rng) + 2.0);
        const double g = 9.81;
        const double y0 = solve_static_offset(m, g, k1, k3);
        const double residual = std::fabs(k1 * y0 + k3 * y0 * y0 * y0 - m * g);
        REQUIRE(residual < 1e-12 * std::max(1.0, m * g));
    }
}

TEST_CASE("static offset rejects non-positive stiffness", "[core_model]") {
    REQUIRE_THROWS_AS(solve_static_offset(1, 9.81, 0.0, 1.0), InvalidParameter);
    REQUIRE_THROWS_AS(solve_static_offset(1, 9.81, 1.0, -2.0), InvalidParameter);
}

TEST_CASE("normalize: vanishing cubic stiffness kills W2", "[core_model]") {
    PhysicalParams p = oracles::fitted_physical_baseline();
    p.k3 = 1e-12;
    const DimlessParams d = normalize(p);
    REQUIRE(std::fabs(d.W2) < 1e-9);
}

TEST_CASE("normalize: symmetric circuits give matched coefficients",
          "[core_model]") {
    PhysicalParams p = oracles::fitted_physical_baseline();
    p.x0 = 1.0;
    p.q0 = 1.0;
    // identical circuits, identical couplings
    p.Lt = p.Ls;
    p.Rt = p.Rs;
    p.Ct = p.Cs;
    p.S2 = p.S1;
    const DimlessParams d = normalize(p);
    REQUIRE(d.alpha1 == d.alpha2);
    REQUIRE(d.alpha4 == d.beta2);
    REQUIRE(d.W4 == d.beta3);
}

TEST_CASE("normalize reproduces the study baseline from the fitted physical set",
          "[core_model]") {
    const DimlessParams d = normalize(oracles::fitted_physical_baseline());
    const DimlessParams want = oracles::baseline_params();
    REQUIRE(d.W2 == Approx(want.W2).epsilon(1e-12));
    REQUIRE(d.W3 == Approx(want.W3).epsilon(1e-12));
    REQUIRE(d.W4 == Approx(want.W4).epsilon(1e-12));
    REQUIRE(d.alpha1 == Approx(want.alpha1).epsilon(1e-12));
    REQUIRE(d.alpha2 == Approx(want.alpha2).epsilon(1e-12));
    REQUIRE(d.alpha3 == Approx(want.alpha3).epsilon(1e-12));
    REQUIRE(d.alpha4 == Approx(want.alpha4).epsilon(1e-12));
    REQUIRE(d.alpha5 == Approx(want.alpha5).epsilon(1e-12));
    REQUIRE(d.beta1 == Approx(want.beta1).epsilon(1e-12));
    REQUIRE(d.beta2 == Approx(want.beta2).epsilon(1e-12));
    REQUIRE(d.beta3 == Approx(want.beta3).epsilon(1e-12));
    REQUIRE(d.E == Approx(want.E).epsilon(1e-12));
    REQUIRE(d.Omega == Approx(want.Omega).epsilon(1e-12));
}

TEST_CASE("rhs_new: unforced origin is a rest point", "[core_model]") {
    DimlessParams d = oracles::baseline_params();
    d.E = 0.0;
    const State6 rate = rhs_new(State6{}, d);
    REQUIRE(rate.Y == 0.0);
    REQUIRE(rate.dY == 0.0);
    REQUIRE(rate.Q1 == 0.0);
    REQUIRE(rate.dQ1 == 0.0);
    REQUIRE(rate.Q2 == 0.0);
    REQUIRE(rate.dQ2 == 0.0);
}

TEST_CASE("rhs_new: at rest only the forcing slot is excited", "[core_model]") {
    const DimlessParams d = oracles::baseline_params();
    const State6 rate = rhs_new(State6{}, d); // tau = 0
    REQUIRE(rate.dQ1 == Approx(0.7812).epsilon(1e-15));
    REQUIRE(rate.dY == 0.0);
    REQUIRE(rate.dQ2 == 0.0);
}

TEST_CASE("rhs_new: displaced magnet acceleration by hand", "[core_model]") {
    const DimlessParams d = oracles::baseline_params();
    State6 s;
    s.Y = 0.1;
    const State6 rate = rhs_new(s, d);
    REQUIRE(rate.dY == Approx(-0.1 + 1.5 * 0.01 - 1.0 * 0.001).epsilon(1e-14));
}

TEST_CASE("rhs_new satisfies the governing equations at random states",
          "[core_model]") {
    const DimlessParams d = oracles::baseline_params();
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        State6 s{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        const State6 r = rhs_new(s, d);
        const double row1 = r.dY + s.Y - d.W2 * s.Y * s.Y +
                            d.W3 * s.Y * s.Y * s.Y + d.alpha1 * s.dQ1 +
                            d.alpha2 * s.dQ2 + d.alpha3 * s.dY;
        const double row2 = r.dQ1 - d.alpha4 * s.dY + d.W4 * s.Q1 +
                            d.alpha5 * s.dQ1 - d.E * std::cos(d.Omega * s.tau);
        const double row3 =
            r.dQ2 + d.beta1 * s.dQ2 + d.beta3 * s.Q2 - d.beta2 * s.dY;
        REQUIRE(std::fabs(row1) < 1e-12);
        REQUIRE(std::fabs(row2) < 1e-12);
        REQUIRE(std::fabs(row3) < 1e-12);
        REQUIRE(r.Y == s.dY);
        REQUIRE(r.Q1 == s.dQ1);
        REQUIRE(r.Q2 == s.dQ2);
    }
}

TEST_CASE("rhs_legacy: static offset balances gravity", "[core_model]") {
    PhysicalParams p = oracles::fitted_physical_baseline();
    p.e = 0.0;
    const double y0 = solve_static_offset(p.m, p.g, p.k1, p.k3);
    StateLegacy s;
    s.x = -y0;
    const StateLegacy rate = rhs_legacy(s, p);
    REQUIRE(std::fabs(rate.dx) < 1e-10);
}

TEST_CASE("rhs_legacy: decoupled linear limit is a harmonic oscillator",
          "[core_model]") {
    PhysicalParams p;
    p.m = 1.0;
    p.g = 0.0;
    p.k1 = 1.0;
    p.k3 = 0.0;
    p.S1 = 0.0;
    p.Cme = 0.0;
    p.Ls = 1.0;
    p.Cs = 1.0;
    p.Rs = 0.0;
    p.e = 0.0;
    StateLegacy s;
    s.x = 0.3;
    s.dx = -0.2;
    const StateLegacy rate = rhs_legacy(s, p);
    REQUIRE(rate.x == -0.2);
    REQUIRE(rate.dx == Approx(-0.3).epsilon(1e-15));
}

TEST_CASE("rhs_legacy satisfies the governing equations at random states",
          "[core_model]") {
    const PhysicalParams p = oracles::fitted_physical_baseline();
    std::mt19937 rng(78);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (int i = 0; i < 200; ++i) {
        StateLegacy s{u(rng), u(rng), u(rng), u(rng), u(rng)};
        const StateLegacy r = rhs_legacy(s, p);
        const double row1 = p.m * r.dx + p.m * p.g + p.k1 * s.x +
                            p.k3 * s.x * s.x * s.x + p.S1 * s.dq1 +
                            p.Cme * s.dx;
        const double row2 = p.Ls * r.dq1 - p.S1 * s.dx + s.q1 / p.Cs +
                            p.Rs * s.dq1 - p.e * std::cos(p.Omega_hat * s.t);
        REQUIRE(std::fabs(row1) < 1e-9);
        REQUIRE(std::fabs(row2) < 1e-9);
    }
}

TEST_CASE("rhs functions are pure", "[core_model]") {
    const DimlessParams d = oracles::baseline_params();
    State6 s;
    s.tau = 1.7;
    s.Y = 0.3;
    s.dQ2 = -0.4;
    const State6 a = rhs_new(s, d);
    const State6 b = rhs_new(s, d);
    REQUIRE(a.dY == b.dY);
    REQUIRE(a.dQ1 == b.dQ1);
    REQUIRE(a.dQ2 == b.dQ2);
}

TEST_CASE("rhs_new degenerates to the legacy dynamics without harvesting",
          "[core_model]") {
    DimlessParams d = oracles::baseline_params();
    d.alpha2 = 0.0;
    d.beta2 = 0.0;
    std::mt19937 rng(79);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 100; ++i) {
        State6 s{u(rng), u(rng), u(rng), u(rng), u(rng), 0.0, 0.0};
        const State6 r6 = rhs_new(s, d);
        const oracles::State4 s4{s.tau, s.Y, s.dY, s.Q1, s.dQ1};
        const oracles::State4 r4 = oracles::rhs_legacy_normalized(s4, d);
        REQUIRE(r6.dY == Approx(r4.dY).margin(1e-15));
        REQUIRE(r6.dQ1 == Approx(r4.dQ1).margin(1e-15));
        REQUIRE(r6.dQ2 == 0.0);
    }
}

TEST_CASE("instantaneous power formulas", "[core_model]") {
    State6 s;
    REQUIRE(power_new(s) == 0.0);
    s.dQ2 = 1.0;
    REQUIRE(power_new(s, 1.0) == 1.0);
    REQUIRE_THROWS_AS(power_new(s, 0.0), InvalidParameter);

    StateLegacy sl;
    REQUIRE(power_legacy(sl, 0.5, 0.25) == 0.0);
    sl.dx = 1.0;
    REQUIRE(power_legacy(sl, 0.7, 0.7, 1.0) == Approx(1.0));
    REQUIRE_THROWS_AS(power_legacy(sl, 0.7, 0.0), InvalidParameter);
    REQUIRE_THROWS_AS(power_legacy(sl, 0.7, 0.7, -1.0), InvalidParameter);
}
