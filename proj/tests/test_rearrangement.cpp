#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hvlab/bumps.hpp"
#include "hvlab/rearrangement.hpp"

using namespace hvlab;

TEST_CASE("already nonincreasing and constant fields are fixed points") {
    auto g = make_grid(3, 4.0, 2.0, 32, 8);
    Field mono = interpolate_analytic(
        g, [](double r, double z) { return std::exp(-r) * (1.0 + 0.1 * z); }, false);
    auto star = schwarz_rearrange(mono);
    for (int j = 0; j <= g->nz; ++j)
        for (int i = 0; i <= g->nr; ++i) CHECK(star.field(i, j) == mono(i, j));
    for (auto flag : star.slice_monotone) CHECK(flag == 1);

    Field c(g, 0.7);
    auto cs = schwarz_rearrange(c);
    for (int j = 0; j <= g->nz; ++j)
        for (int i = 0; i <= g->nr; ++i) CHECK(cs.field(i, j) == 0.7);
}

TEST_CASE("idempotence is exact on random fields") {
    auto g = make_grid(3, 10.0, 10.0, 48, 24);
    auto suite = bump_suite(g, 10, 21);
    for (const auto& f : suite) {
        auto once = schwarz_rearrange(f);
        auto twice = schwarz_rearrange(once.field);
        for (std::size_t k = 0; k < f.size(); ++k)
            CHECK(twice.field.data()[k] == once.field.data()[k]);
    }
}

TEST_CASE("annulus indicator becomes a disc of equal measure") {
    auto g = make_grid(3, 4.0, 2.0, 256, 8);
    Field f(g);
    for (int i = 0; i <= g->nr; ++i) {
        const double r = g->r[std::size_t(i)];
        if (r >= 1.0 && r <= 2.0) f(i, 0) = 1.0;
    }
    auto star = schwarz_rearrange(f);
    // measure equality: r*^2/2 = (4-1)/2 -> r* = sqrt(3)
    const double rstar = std::sqrt(3.0);
    for (int i = 0; i <= g->nr; ++i) {
        const double r = g->r[std::size_t(i)];
        if (r < rstar - 2.0 * g->hr) CHECK(star.field(i, 0) == doctest::Approx(1.0).epsilon(1e-12));
        if (r > rstar + 2.0 * g->hr) CHECK(star.field(i, 0) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("order preservation: u <= v implies u* <= v*") {
    auto g = make_grid(3, 8.0, 8.0, 40, 16);
    auto suite = bump_suite(g, 6, 5);
    for (const auto& u : suite) {
        Field v = map_field(u, [](double x) { return x + 0.3 * x * x; }); // monotone map keeps order
        auto us = schwarz_rearrange(u);
        auto vs = schwarz_rearrange(v);
        for (std::size_t k = 0; k < u.size(); ++k)
            CHECK(us.field.data()[k] <= vs.field.data()[k] + 1e-14);
    }
}

TEST_CASE("equimeasurability within the one-cell granularity bound") {
    auto g = make_grid(3, 12.0, 12.0, 96, 48);
    auto suite = bump_suite(g, 12, 31);
    for (const auto& f : suite) {
        auto star = schwarz_rearrange(f);
        for (double s : {1.0, 2.0, 4.0}) {
            auto rep = equimeasurability_check(f, star, s);
            CHECK(rep.lhs <= rep.rhs); // worst slice error <= 2 h_r / R
        }
    }
    Field c(g, 2.5);
    auto cs = schwarz_rearrange(c);
    auto rep = equimeasurability_check(c, cs, 2.0);
    CHECK(rep.lhs == 0.0);
}

TEST_CASE("contraction property on seeded pairs") {
    auto g = make_grid(3, 10.0, 10.0, 64, 32);
    auto suite = bump_suite(g, 20, 77);
    for (std::size_t k = 0; k + 1 < suite.size(); k += 2) {
        for (double s : {2.0, 3.0}) {
            auto rep = contraction_check(suite[k], suite[k + 1], s);
            CHECK(rep.slack >= -1e-12 * std::abs(rep.rhs));
        }
    }
    // v = 0 reduces to equimeasurability of the volume mass
    Field zero(g);
    auto rep = contraction_check(suite[0], zero, 2.0);
    CHECK(std::abs(rep.slack) <= 2.0 * g->hr / g->R * rep.rhs + 1e-12);
    // u = v gives 0 <= 0
    auto same = contraction_check(suite[0], suite[0], 2.0);
    CHECK(same.lhs == 0.0);
    CHECK(same.rhs == 0.0);

    auto g2 = make_grid(3, 10.0, 10.0, 32, 32);
    Field other(g2);
    CHECK_THROWS_AS(contraction_check(suite[0], other, 2.0), ArgumentError);
}

TEST_CASE("energy comparison: identity on monotone input, sign on smooth bumps") {
    auto g = make_grid(3, 8.0, 8.0, 96, 96);
    Field mono = interpolate_analytic(
        g, [](double r, double z) { return std::exp(-r - 0.4 * z); }, true);
    auto em = energy_comparison(mono, Weight::power(2.0));
    CHECK(em.lhs == em.rhs);

    // two-bump field on a fine grid: strict energy decrease
    Field f = interpolate_analytic(
        g,
        [](double r, double z) {
            const double a = std::exp(-((r - 1.0) * (r - 1.0) + z * z) / 0.4);
            const double b = std::exp(-((r - 3.0) * (r - 3.0) + (z - 0.5) * (z - 0.5)) / 0.3);
            return a + 0.8 * b;
        },
        true);
    auto e = energy_comparison(f, Weight::power(2.0));
    CHECK(e.slack > 0.0);

    Field zero(g);
    auto ez = energy_comparison(zero, Weight::power(2.0));
    CHECK(ez.lhs == 0.0);
    CHECK(ez.rhs == 0.0);
}

TEST_CASE("energy comparison tolerance shrinks under refinement on the bump suite") {
    // discrete Polya-Szego defect: slack >= -tol(h) with tol ~ h
    double worst[2] = {0.0, 0.0};
    int idx = 0;
    for (int n : {48, 96}) {
        auto g = make_grid(3, 10.0, 10.0, n, n);
        auto suite = bump_suite(g, 10, 13);
        double w = 0.0;
        for (const auto& f : suite) {
            auto e = energy_comparison(f, Weight::power(2.0));
            w = std::min(w, e.slack / e.rhs);
        }
        worst[idx++] = -w; // positive when some slack is negative
        const double tol = 5.0 * g->hr / g->R;
        CHECK(-w <= tol);
    }
    CHECK(worst[1] <= worst[0] + 1e-12);
}

TEST_CASE("radial decay diagnostic") {
    auto g = make_grid(3, 16.0, 16.0, 96, 96);
    InstantonParams bd{InstantonParams::Kind::BoundaryBubble, 1.0, 1.0};
    Field f = interpolate_analytic(
        g, [&](double r, double z) { return instanton_eval(bd, 3, r, z); }, true);
    auto star = schwarz_rearrange(f);
    const double ratio = radial_decay_check(star, Weight::power(2.0));
    CHECK(ratio > 0.0);
    CHECK(std::isfinite(ratio));

    // stability under refinement: the sup ratio varies by < 20%
    double ratios[3];
    int k = 0;
    for (int n : {64, 128, 256}) {
        auto gg = make_grid(3, 16.0, 16.0, n, n);
        Field ff = interpolate_analytic(
            gg, [&](double r, double z) { return instanton_eval(bd, 3, r, z); }, true);
        ratios[k++] = radial_decay_check(schwarz_rearrange(ff), Weight::power(2.0));
    }
    CHECK(std::abs(ratios[1] - ratios[0]) / ratios[0] < 0.2);
    CHECK(std::abs(ratios[2] - ratios[1]) / ratios[1] < 0.2);

    Field zero(g);
    auto zs = schwarz_rearrange(zero);
    CHECK_THROWS_AS(radial_decay_check(zs, Weight::power(2.0)), ArgumentError);
    CHECK_THROWS_AS(radial_decay_check(star, Weight::power(1.0)), AdmissibilityError);
}

TEST_CASE("negative values are rearranged through their absolute value, flagged") {
    auto g = make_grid(3, 4.0, 2.0, 16, 8);
    Field f(g);
    f(2, 0) = -1.0;
    f(5, 0) = 0.5;
    auto star = schwarz_rearrange(f);
    CHECK(star.abs_applied);
    CHECK(min_value(star.field) >= 0.0);
}
