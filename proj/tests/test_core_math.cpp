#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hvlab/core_math.hpp"
#include "hvlab/errors.hpp"

using namespace hvlab;

TEST_CASE("critical exponents are the exact rationals") {
    auto [s3, l3] = critical_exponents(3);
    CHECK(s3 == Rational(6));
    CHECK(l3 == Rational(4));
    auto [s4, l4] = critical_exponents(4);
    CHECK(s4 == Rational(4));
    CHECK(l4 == Rational(3));
    auto [s6, l6] = critical_exponents(6);
    CHECK(s6 == Rational(3));
    CHECK(l6 == Rational(5, 2));
    CHECK(l6.value() == 2.5);
    CHECK_THROWS_AS(critical_exponents(2), DimensionError);

    for (int N = 3; N <= 10; ++N) {
        auto [ts, tl] = critical_exponents(N);
        CHECK(tl < ts);
        // 2* (N-2) = 2N exactly
        CHECK(ts * Rational(N - 2) == Rational(2 * N));
    }
}

TEST_CASE("hardy constant formula and admissibility") {
    CHECK(hardy_constant(2.0, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hardy_constant(3.0, 5.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hardy_constant(2.0, 1.0 + 1e-9) == doctest::Approx(5e-10).epsilon(1e-6));
    CHECK_THROWS_AS(hardy_constant(2.0, 1.0), AdmissibilityError);
    CHECK_THROWS_AS(hardy_constant(2.0, 0.5), AdmissibilityError);
    CHECK_THROWS_AS(hardy_constant(1.0, 3.0), AdmissibilityError);

    // strictly increasing in gamma at fixed p
    double prev = 0.0;
    for (double g = 1.5; g < 6.0; g += 0.5) {
        const double c = hardy_constant(2.0, g);
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("trace best constant, both sphere conventions") {
    CHECK(trace_best_constant(3, SphereConvention::SphereSurface) ==
          doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(trace_best_constant(3, SphereConvention::BallVolume) ==
          doctest::Approx(0.5 * std::sqrt(4.0 * M_PI / 3.0)).epsilon(1e-14));
    CHECK(trace_best_constant(4, SphereConvention::SphereSurface) ==
          doctest::Approx(std::cbrt(2.0 * M_PI * M_PI)).epsilon(1e-14));
    CHECK_THROWS_AS(trace_best_constant(2, SphereConvention::SphereSurface), DimensionError);
}

TEST_CASE("sphere measures") {
    CHECK(sphere_surface_measure(1) == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
    CHECK(sphere_surface_measure(2) == doctest::Approx(4.0 * M_PI).epsilon(1e-15));
    CHECK(sphere_surface_measure(3) == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-14));
    CHECK(ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-14));
}

TEST_CASE("instanton point values") {
    InstantonParams bd{InstantonParams::Kind::BoundaryBubble, 1.0, 1.0};
    CHECK(instanton_eval(bd, 3, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    InstantonParams in{InstantonParams::Kind::InteriorBubble, 1.0, 1.0};
    CHECK(instanton_eval(in, 3, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(instanton_eval(bd, 4, 1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("instanton gradient matches finite differences") {
    InstantonParams bd{InstantonParams::Kind::BoundaryBubble, 0.7, 1.3};
    const double h = 1e-6;
    for (double r : {0.3, 1.1, 2.5}) {
        for (double zc : {0.0, 0.4, 1.7}) {
            auto [gr, gz] = instanton_grad(bd, 3, r, zc);
            const double fr =
                (instanton_eval(bd, 3, r + h, zc) - instanton_eval(bd, 3, r - h, zc)) / (2 * h);
            const double fz =
                (instanton_eval(bd, 3, r, zc + h) - instanton_eval(bd, 3, r, zc - h)) / (2 * h);
            CHECK(gr == doctest::Approx(fr).epsilon(1e-7));
            CHECK(gz == doctest::Approx(fz).epsilon(1e-7));
        }
    }
}

TEST_CASE("boundary bubble is discretely harmonic: interior residual order ~2") {
    InstantonParams bd{InstantonParams::Kind::BoundaryBubble, 1.0, 1.0};
    const double hs[] = {1.0 / 32, 1.0 / 64, 1.0 / 128};
    struct Pt {
        double r, z;
    } pts[] = {{1.0, 1.0}, {0.5, 0.75}, {2.0, 0.5}, {1.5, 2.0}, {0.8, 1.6}};
    for (const auto& pt : pts) {
        double res[3];
        for (int k = 0; k < 3; ++k)
            res[k] = instanton_pde_residual(bd, 3, pt.r, pt.z, hs[k]).interior;
        const double order = std::log2(res[0] / res[2]) / 2.0;
        CHECK(order > 1.5);
        CHECK(order < 2.5);
    }
}

TEST_CASE("interior bubble solves the critical interior equation") {
    InstantonParams in{InstantonParams::Kind::InteriorBubble, 1.0, 1.0};
    CHECK(instanton_interior_coefficient(in, 3) == doctest::Approx(3.0).epsilon(1e-15));
    const double hs[] = {1.0 / 32, 1.0 / 64, 1.0 / 128};
    struct Pt {
        double r, z;
    } pts[] = {{0.5, 0.5}, {1.0, 1.0}, {0.7, 1.5}, {1.5, 0.8}, {2.0, 2.0}};
    for (const auto& pt : pts) {
        double res[3];
        for (int k = 0; k < 3; ++k)
            res[k] = instanton_pde_residual(in, 3, pt.r, pt.z, hs[k]).interior;
        const double order = std::log2(res[0] / res[2]) / 2.0;
        CHECK(order > 1.5);
        CHECK(order < 2.5);
    }
}

TEST_CASE("boundary Neumann coefficient is (N-2) for the boundary bubble") {
    for (int N : {3, 4, 5}) {
        InstantonParams bd{InstantonParams::Kind::BoundaryBubble, 1.0, 1.0};
        CHECK(instanton_boundary_coefficient(bd, N) == doctest::Approx(double(N - 2)).epsilon(1e-15));
        for (double r : {0.5, 1.0, 2.0}) {
            const double u0 = instanton_eval(bd, N, r, 0.0);
            const double scale = std::abs(instanton_grad(bd, N, r, 0.0).second) + u0;
            CHECK(instanton_boundary_residual_analytic(bd, N, r) < 1e-12 * scale);
        }
    }
    // interior bubble: computed signed coefficient is -(N-2)/eps
    InstantonParams in{InstantonParams::Kind::InteriorBubble, 0.5, 1.0};
    CHECK(instanton_boundary_coefficient(in, 3) == doctest::Approx(-2.0).epsilon(1e-15));
    for (double r : {0.5, 1.5}) {
        const double u0 = instanton_eval(in, 3, r, 0.0);
        CHECK(instanton_boundary_residual_analytic(in, 3, r) < 1e-12 * u0);
    }
}

TEST_CASE("stencil guard near the axis") {
    InstantonParams bd{InstantonParams::Kind::BoundaryBubble, 1.0, 1.0};
    CHECK_THROWS_AS(instanton_pde_residual(bd, 3, 0.001, 1.0, 0.01), StencilError);
}

TEST_CASE("normalize boundary bubble to a target Neumann constant") {
    InstantonParams bd{InstantonParams::Kind::BoundaryBubble, 1.0, 1.0};
    auto n1 = normalize_instanton_to_constant(bd, 3, 1.0);
    CHECK(n1.amplitude == doctest::Approx(1.0).epsilon(1e-15));
    auto n2 = normalize_instanton_to_constant(bd, 3, std::sqrt(M_PI));
    CHECK(n2.amplitude == doctest::Approx(std::pow(M_PI, -0.25)).epsilon(1e-14));
    CHECK(instanton_boundary_coefficient(n2, 3) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
    for (double r : {0.5, 1.0, 2.0}) {
        const double u0 = instanton_eval(n2, 3, r, 0.0);
        CHECK(instanton_boundary_residual_analytic(n2, 3, r) < 1e-6 * u0);
    }
    auto n3 = normalize_instanton_to_constant(bd, 4, 2.0);
    CHECK(n3.amplitude == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(normalize_instanton_to_constant(bd, 3, -1.0), DomainError);
}

TEST_CASE("rho_1 hypothesis check") {
    Weight w2 = Weight::power(2.0);
    auto r = check_rho1(w2, {0.5, 1.0, 10.0});
    CHECK(r.holds);
    CHECK(r.c1_estimate < 2.0);
    CHECK(r.c1_estimate == doctest::Approx(2.0 * 10.0 / 11.0).epsilon(1e-14));

    Weight w0 = Weight::power(0.0);
    CHECK_FALSE(check_rho1(w0, {0.5, 1.0}).holds);

    Weight w3 = Weight::power(3.0);
    std::vector<double> dense;
    for (int k = 1; k <= 4000; ++k) dense.push_back(100.0 * k / 4000.0);
    auto r3 = check_rho1(w3, dense);
    CHECK(r3.holds);
    CHECK(r3.c1_estimate == doctest::Approx(3.0 * 100.0 / 101.0).epsilon(1e-12));

    CHECK_THROWS_AS(check_rho1(w2, {}), ArgumentError);
}

TEST_CASE("tabulated weight obeys (rho_0) against its claimed gamma") {
    // table of (1+s)^2 sampled densely: piecewise linear overshoots the chord,
    // so (1+s)^2 <= rho stays true on the nodes
    std::vector<double> s, v;
    for (int k = 0; k <= 64; ++k) {
        s.push_back(k * 0.25);
        v.push_back(std::pow(1.0 + s.back(), 2.0));
    }
    Weight w = Weight::tabulated(s, v);
    for (double x : {0.1, 1.0, 5.0, 15.9}) CHECK(std::pow(1.0 + x, 2.0) <= w.eval(x) * (1 + 1e-12));
    auto r = check_rho1(w, {0.5, 1.0, 5.0});
    CHECK(r.holds);
}

TEST_CASE("power weight monotone comparison across exponents") {
    Weight w2 = Weight::power(2.0), w3 = Weight::power(3.0);
    for (double x : {0.0, 0.3, 1.0, 7.5}) CHECK(w2.eval(x) <= w3.eval(x));
}
