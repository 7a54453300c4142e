#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hvlab/bumps.hpp"
#include "hvlab/solver.hpp"

using namespace hvlab;

namespace {

ProblemParams thm16_params() {
    ProblemParams p;
    p.N = 3;
    p.a = 0.0;
    p.b = 1.0;
    p.p = 2.0;
    p.q = 3.0;
    return p;
}

} // namespace

TEST_CASE("energy split: zeros, formula instantiation, linearity in a and b") {
    auto g = make_grid(3, 8.0, 8.0, 48, 48);
    Weight w = Weight::power(3.0);
    ProblemParams pp = thm16_params();

    Field zero(g);
    auto e0 = energy(zero, pp, w);
    CHECK(e0.dirichlet == 0.0);
    CHECK(e0.boundary_term == 0.0);
    CHECK(e0.volume_term == 0.0);
    CHECK(e0.total == 0.0);

    Field f = interpolate_analytic(
        g, [](double r, double z) { return std::exp(-r - 0.7 * z); }, true);
    auto e = energy(f, pp, w);
    const double expect_total = 0.5 * weighted_dirichlet_energy(f, w) -
                                (1.0 / 3.0) * std::pow(lq_norm_boundary(f, 3.0), 3.0);
    CHECK(e.total == doctest::Approx(expect_total).epsilon(1e-12));
    CHECK(e.total == doctest::Approx(e.dirichlet - e.boundary_term - e.volume_term).epsilon(1e-15));

    ProblemParams doubled = pp;
    doubled.b = 2.0;
    auto e2 = energy(f, doubled, w);
    CHECK(e2.boundary_term == doctest::Approx(2.0 * e.boundary_term).epsilon(1e-14));
}

TEST_CASE("mountain-pass geometry: I(t u) goes negative for large t") {
    auto g = make_grid(3, 8.0, 8.0, 48, 48);
    Weight w = Weight::power(3.0);
    ProblemParams pp = thm16_params();
    Field f = interpolate_analytic(
        g, [](double r, double z) { return std::exp(-(r * r + z * z)); }, true);
    const double n = std::sqrt(weighted_dirichlet_energy(f, w));
    Field unit = map_field(f, [n](double v) { return v / n; });
    Field big = map_field(unit, [](double v) { return 1e3 * v; });
    CHECK(energy(big, pp, w).total < 0.0);
    Field small = map_field(unit, [](double v) { return 1e-3 * v; });
    CHECK(energy(small, pp, w).total > 0.0);
}

TEST_CASE("gradient consistency: central differences of I match the pairing") {
    auto g = make_grid(3, 8.0, 8.0, 40, 40);
    Weight w = Weight::power(3.0);
    ProblemParams pp = thm16_params();
    pp.a = 0.5;
    pp.p = 4.0; // exercise the volume term too

    auto us = bump_suite(g, 20, 11);
    auto vs = bump_suite(g, 20, 317);
    WeightedStiffness K(g, w);
    std::vector<double> warm(g->num_nodes(), 0.0);
    const double t = 1e-4;
    for (int k = 0; k < 20; ++k) {
        Field u = us[std::size_t(k)];
        const Field& v = vs[std::size_t(k)];
        std::fill(warm.begin(), warm.end(), 0.0);
        auto eg = energy_gradient(u, pp, K, warm, 1e-12, 50000);
        // <g, v>_rho = <K g, v> = <l, v>
        Field kg(g);
        K.apply(eg.direction, kg);
        const double pair = dot(kg, v);

        Field up = u, um = u;
        axpy(up, t, v);
        axpy(um, -t, v);
        const double dd = (energy(up, pp, w).total - energy(um, pp, w).total) / (2.0 * t);
        CHECK(std::abs(dd - pair) <= 1e-4 * std::max({std::abs(dd), std::abs(pair), 1e-12}));
    }

    // field == 0 is a critical point
    Field zero(g);
    auto eg0 = energy_gradient(zero, pp, w);
    CHECK(eg0.residual_norm == 0.0);
}

TEST_CASE("regime classification") {
    Weight w3 = Weight::power(3.0);
    CHECK(classify_regime(thm16_params(), 3.0) == SolveRegime::BoundaryDriven);
    ProblemParams t17 = thm16_params();
    t17.a = 1.0;
    t17.p = 4.0;
    CHECK(classify_regime(t17, 3.0) == SolveRegime::DoublyPositive);
    ProblemParams t17i = thm16_params();
    t17i.a = 0.5;
    t17i.p = 2.0;
    CHECK(classify_regime(t17i, 3.0) == SolveRegime::BorderlineVolume);
    ProblemParams t17ii = thm16_params();
    t17ii.a = 1.0;
    t17ii.p = 4.0;
    t17ii.q = 2.0;
    t17ii.b = 0.5;
    CHECK(classify_regime(t17ii, 3.0) == SolveRegime::BorderlineTrace);
    ProblemParams t18 = thm16_params();
    t18.a = 1.0;
    t18.b = -1.0;
    t18.p = 4.0;
    t18.q = 2.5;
    CHECK(classify_regime(t18, 3.0) == SolveRegime::VolumeDriven);
    ProblemParams crit = thm16_params();
    crit.q = 4.0;
    CHECK(classify_regime(crit, 3.0) == SolveRegime::CriticalTrace);
    ProblemParams bad = thm16_params();
    bad.b = -1.0;
    CHECK_THROWS_AS(classify_regime(bad, 3.0), ArgumentError);
}

TEST_CASE("mountain pass solves the boundary-driven regime on a coarse grid") {
    auto g = make_grid(3, 10.0, 10.0, 48, 48);
    Weight w = Weight::power(3.0);
    SolverConfig sc;
    sc.grad_tol = 1e-4;
    sc.max_iters = 600;
    auto res = mountain_pass_solve(thm16_params(), w, g, sc);
    CHECK(res.converged);
    CHECK(res.level > 0.0);
    CHECK(res.residual_norm < 1e-4);
    CHECK(min_value(res.solution) >= 0.0);
    CHECK(res.ring_level > 0.0);
    for (std::size_t k = 1; k < res.path_max_history.size(); ++k)
        CHECK(res.path_max_history[k] <= res.path_max_history[k - 1] + 1e-12);

    auto suite = weak_test_suite(g, 30, 5);
    CHECK(weak_residual(res.solution, thm16_params(), w, suite) <= 10.0 * sc.grad_tol);
}

TEST_CASE("weak residual of the interpolated interior bubble is O(h^2)") {
    InstantonParams in{InstantonParams::Kind::InteriorBubble, 1.0, 1.0};
    ProblemParams pp;
    pp.N = 3;
    pp.p = 6.0;
    pp.q = 4.0;
    pp.a = instanton_interior_coefficient(in, 3);
    pp.b = instanton_boundary_coefficient(in, 3);
    Weight w = Weight::power(0.0);

    double res_h[2];
    int k = 0;
    for (int n : {64, 128}) {
        auto g = make_grid(3, 12.0, 12.0, n, n);
        Field u = interpolate_analytic(
            g, [&](double r, double z) { return instanton_eval(in, 3, r, z); }, false);
        auto suite = weak_test_suite(g, 15, 23);
        res_h[k++] = weak_residual(u, pp, w, suite);
    }
    CHECK(res_h[1] < res_h[0]);
    const double order = std::log2(res_h[0] / res_h[1]);
    CHECK(order > 1.5);
    CHECK(order < 2.7);
}

TEST_CASE("robin transform: constant v reproduces |1 - b| on the boundary") {
    auto g = make_grid(3, 8.0, 8.0, 64, 64);
    Weight w2 = Weight::power(2.0);
    ProblemParams pp = thm16_params(); // a = 0, b = 1, q = 3
    Field u = interpolate_analytic(
        g, [](double, double z) { return 1.0 / (1.0 + z); }, true);
    auto rr = robin_transform_check(u, pp, w2);
    CHECK(rr.interior < 1e-10); // v is constant inside the test region
    CHECK(rr.boundary == doctest::Approx(std::abs(1.0 - pp.b)).epsilon(1e-9));

    ProblemParams pb = pp;
    pb.b = 3.0;
    auto rb = robin_transform_check(u, pb, w2);
    CHECK(rb.boundary == doctest::Approx(2.0).epsilon(1e-9));

    Field zero(g);
    auto rz = robin_transform_check(zero, pp, w2);
    CHECK(rz.interior == 0.0);
    CHECK(rz.boundary == 0.0);

    CHECK_THROWS_AS(robin_transform_check(u, pp, Weight::power(3.0)), ArgumentError);
    ProblemParams pa = pp;
    pa.a = 1.0;
    CHECK_THROWS_AS(robin_transform_check(u, pa, w2), ArgumentError);
}

TEST_CASE("ring property: random fields at the detected radius have positive energy") {
    auto g = make_grid(3, 10.0, 10.0, 32, 32);
    Weight w = Weight::power(3.0);
    SolverConfig sc;
    sc.grad_tol = 5e-4;
    sc.max_iters = 500;
    auto res = mountain_pass_solve(thm16_params(), w, g, sc);

    BumpOptions opts;
    std::mt19937_64 rng(424242);
    for (int k = 0; k < 50; ++k) {
        Field f = random_bump_field(g, rng, opts);
        const double n = std::sqrt(weighted_dirichlet_energy(f, w));
        scale_field(f, res.ring_radius / n);
        CHECK(energy(f, thm16_params(), w).total > 0.0);
    }
}
