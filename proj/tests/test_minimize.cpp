#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hvlab/bumps.hpp"
#include "hvlab/minimize.hpp"

using namespace hvlab;

namespace {

MinimizeConfig boundary_cfg(double q, double gamma) {
    MinimizeConfig c;
    c.constraint = ConstraintKind::BoundaryLq;
    c.exponent = q;
    c.weight = Weight::power(gamma);
    c.grad_tol = 1e-6;
    c.max_iters = 300;
    return c;
}

} // namespace

TEST_CASE("rayleigh quotient: scaling invariance and zero-trace error") {
    auto g = make_grid(3, 10.0, 10.0, 48, 48);
    auto cfg = boundary_cfg(3.0, 3.0);
    Field f = interpolate_analytic(
        g, [](double r, double z) { return std::exp(-r - 0.5 * z); }, true);
    const double q1 = rayleigh_quotient(f, cfg);
    Field f3 = map_field(f, [](double v) { return -17.0 * v; });
    const double q2 = rayleigh_quotient(f3, cfg);
    CHECK(std::abs(q1 - q2) / q1 < 1e-12);

    // supported away from z = 0: zero trace
    Field away = interpolate_analytic(
        g,
        [](double r, double z) {
            const double d2 = (r - 2.0) * (r - 2.0) + (z - 5.0) * (z - 5.0);
            return z > 2.0 ? std::exp(-d2) : 0.0;
        },
        true);
    CHECK_THROWS_AS(rayleigh_quotient(away, cfg), ArgumentError);
}

TEST_CASE("minimize: attained regime converges with a nonincreasing trace") {
    auto g = make_grid(3, 5.0, 5.0, 48, 48);
    auto cfg = boundary_cfg(3.0, 3.0);
    cfg.multistart = 2;
    auto res = minimize(g, cfg);
    CHECK(res.converged);
    CHECK(res.grad_norm_final < 1e-6);
    CHECK(res.best_value > 0.0);
    for (std::size_t k = 1; k < res.value_trace.size(); ++k)
        CHECK(res.value_trace[k] <= res.value_trace[k - 1]);
    // minimizer exposed at nodal constraint norm one
    CHECK(constraint_norm(res.minimizer, cfg) == doctest::Approx(1.0).epsilon(1e-10));
    // concentration bounded away from 1 on a domain adapted to the
    // extremal's intrinsic scale
    CHECK(res.concentration_index <= 0.9);
}

TEST_CASE("weighted minimum dominates the unweighted minimum") {
    auto g = make_grid(3, 10.0, 10.0, 48, 48);
    auto c0 = boundary_cfg(4.0, 0.0);
    c0.grad_tol = 1e-3;
    c0.max_iters = 200;
    auto c2 = boundary_cfg(4.0, 2.0);
    c2.grad_tol = 1e-3;
    c2.max_iters = 200;
    double v0, v2;
    try {
        v0 = minimize(g, c0).best_value;
    } catch (const MinimizeMaxIter& e) {
        v0 = e.best.best_value;
    }
    try {
        v2 = minimize(g, c2).best_value;
    } catch (const MinimizeMaxIter& e) {
        v2 = e.best.best_value;
    }
    CHECK(v2 >= v0 * (1.0 - 1e-10));
}

TEST_CASE("volume constraint path works") {
    auto g = make_grid(3, 5.0, 5.0, 40, 40);
    MinimizeConfig cfg;
    cfg.constraint = ConstraintKind::VolumeLp;
    cfg.exponent = 3.0;
    cfg.weight = Weight::power(3.0);
    cfg.grad_tol = 1e-5;
    cfg.max_iters = 300;
    auto res = minimize(g, cfg);
    CHECK(res.converged);
    CHECK(res.best_value > 0.0);
    CHECK(lp_norm_volume(res.minimizer, 3.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("exponent admissibility window") {
    auto g = make_grid(3, 5.0, 5.0, 16, 16);
    auto cfg = boundary_cfg(4.5, 3.0); // above 2_* = 4
    CHECK_THROWS_AS(minimize(g, cfg), AdmissibilityError);
    auto cfg2 = boundary_cfg(1.5, 3.0);
    CHECK_THROWS_AS(minimize(g, cfg2), AdmissibilityError);
}

TEST_CASE("rescale diagnostic: identity at delta 1, radial share decreases") {
    auto g = make_grid(3, 10.0, 10.0, 64, 64);
    Weight w = Weight::power(3.0);
    Field f = interpolate_analytic(
        g,
        [](double r, double z) {
            return std::exp(-((r - 1.2) * (r - 1.2) + z * z) / 0.8) +
                   0.5 * std::exp(-(r * r + (z - 0.6) * (z - 0.6)) / 0.5);
        },
        true);
    auto samples = rescale_diagnostic(f, w, {1.0, 0.5, 0.25, 0.125, 0.0625});
    REQUIRE(samples.size() == 5);

    MinimizeConfig c2 = boundary_cfg(2.0, 3.0);
    CHECK(samples[0].quotient == doctest::Approx(rayleigh_quotient(f, c2)).epsilon(1e-12));

    for (std::size_t k = 1; k < samples.size(); ++k)
        CHECK(samples[k].radial_share < samples[k - 1].radial_share);

    // delta -> 0 limit: quotient approaches the vertical-energy ratio of the
    // delta = 1 profile within 5% by delta = 1/16
    const double bn = lq_norm_boundary(f, 2.0);
    const double ez = weighted_energy_components(f, w).second;
    const double limit = ez / (bn * bn);
    CHECK(std::abs(samples.back().quotient - limit) / limit < 0.05);

    CHECK_THROWS_AS(rescale_diagnostic(f, w, {0.0}), ArgumentError);
}

TEST_CASE("concentration diagnostic: exact bubble self-fit, random field misfit") {
    auto g = make_grid(3, 20.0, 20.0, 64, 64);
    InstantonParams bd{InstantonParams::Kind::BoundaryBubble, 1.0, 1.0};
    MinimizeResult fake;
    fake.minimizer = interpolate_analytic(
        g, [&](double r, double z) { return instanton_eval(bd, 3, r, z); }, true);
    auto fit = concentration_diagnostic(fake, {4.0, 2.0, 1.0, 0.5, 0.25});
    CHECK(fit.best_fit_eps == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.fit_error < 1e-10);

    std::mt19937_64 rng(5);
    MinimizeResult noisy;
    noisy.minimizer = Field(g);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int j = 0; j <= g->nz; ++j)
        for (int i = 0; i <= g->nr; ++i) noisy.minimizer(i, j) = u(rng);
    auto bad = concentration_diagnostic(noisy, {4.0, 2.0, 1.0, 0.5, 0.25});
    CHECK(bad.fit_error > 0.5);
}

TEST_CASE("max-iteration error carries the best run so far") {
    auto g = make_grid(3, 5.0, 5.0, 32, 32);
    auto cfg = boundary_cfg(3.0, 3.0);
    cfg.max_iters = 2;
    cfg.grad_tol = 1e-14;
    try {
        minimize(g, cfg);
        FAIL("expected MinimizeMaxIter");
    } catch (const MinimizeMaxIter& e) {
        CHECK(e.best.best_value > 0.0);
        CHECK(e.best.iterations == 2);
    }
}
