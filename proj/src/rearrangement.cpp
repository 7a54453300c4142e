#include "hvlab/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hvlab {

namespace {

/// Pour the descending-sorted (value, measure) stream into the cells in
/// increasing-r order. A cell covered by a single stream entry takes its
/// value verbatim, so already-monotone rows reproduce exactly; straddling
/// cells take the measure-weighted average.
void rearrange_row(const double* in, double* out, const std::vector<double>& c, int n) {
    thread_local std::vector<int> order;
    order.resize(static_cast<std::size_t>(n + 1));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return in[a] > in[b]; });

    int src = 0;
    double src_left = c[std::size_t(order[0])];
    auto advance = [&]() {
        if (src < n) {
            ++src;
            src_left = c[std::size_t(order[std::size_t(src)])];
        } else {
            src_left = 0.0;
        }
    };

    for (int j = 0; j <= n; ++j) {
        const double cap = c[std::size_t(j)];
        if (src_left >= cap) {
            out[j] = in[order[std::size_t(src)]];
            src_left -= cap;
            if (src_left <= 0.0) advance();
            continue;
        }
        // straddles entries: measure-weighted average
        double acc = in[order[std::size_t(src)]] * src_left;
        double need = cap - src_left;
        advance();
        while (need > 0.0 && src_left > 0.0) {
            const double take = std::min(src_left, need);
            acc += in[order[std::size_t(src)]] * take;
            src_left -= take;
            need -= take;
            if (src_left <= 0.0) advance();
        }
        if (need > 0.0) acc += in[order[std::size_t(n)]] * need; // rounding drift guard
        out[j] = acc / cap;
    }
    // clamp out floating-point wobble so the slice is exactly nonincreasing
    for (int j = 1; j <= n; ++j)
        if (out[j] > out[j - 1]) out[j] = out[j - 1];
}

} // namespace

RearrangedField schwarz_rearrange(const Field& field) {
    if (!all_finite(field)) throw NumericsError("schwarz_rearrange: non-finite field");
    const AxisymGrid& g = field.grid();

    RearrangedField out;
    out.field = Field(field.grid_ptr());
    out.slice_monotone.assign(std::size_t(g.nz + 1), 0);
    out.abs_applied = min_value(field) < 0.0;

    const Field* src = &field;
    Field absf;
    if (out.abs_applied) {
        absf = map_field(field, [](double v) { return std::abs(v); });
        src = &absf;
    }

    const double* u = src->data();
    double* v = out.field.data();
    const int nr = g.nr;
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (int j = 0; j <= g.nz; ++j) {
        rearrange_row(u + g.idx(0, j), v + g.idx(0, j), g.cr, nr);
    }
    for (int j = 0; j <= g.nz; ++j) {
        bool mono = true;
        for (int i = 1; i <= nr && mono; ++i)
            if (out.field(i, j) > out.field(i - 1, j)) mono = false;
        out.slice_monotone[std::size_t(j)] = mono ? 1 : 0;
    }
    return out;
}

InequalityReport equimeasurability_check(const Field& field, const RearrangedField& rearranged,
                                         double s) {
    if (s < 1.0) throw ArgumentError("equimeasurability_check: s must be >= 1");
    if (!field.same_grid(rearranged.field))
        throw ArgumentError("equimeasurability_check: grid mismatch");
    const AxisymGrid& g = field.grid();

    double worst = 0.0;
    for (int j = 0; j <= g.nz; ++j) {
        double a = 0.0, b = 0.0;
        for (int i = 0; i <= g.nr; ++i) {
            a += g.cr[std::size_t(i)] * std::pow(std::abs(field(i, j)), s);
            b += g.cr[std::size_t(i)] * std::pow(std::abs(rearranged.field(i, j)), s);
        }
        const double na = std::pow(a, 1.0 / s), nb = std::pow(b, 1.0 / s);
        const double scale = std::max(na, nb);
        if (scale > 0.0) worst = std::max(worst, std::abs(na - nb) / scale);
    }
    const double tol = 2.0 * g.hr / g.R;
    auto rep = InequalityReport::make(worst, tol, s, {"equimeasurability"});
    return rep;
}

InequalityReport contraction_check(const Field& u, const Field& v, double s) {
    if (!u.same_grid(v)) throw ArgumentError("contraction_check: grid mismatch");
    auto us = schwarz_rearrange(u);
    auto vs = schwarz_rearrange(v);
    Field dstar = map_fields(us.field, vs.field, [](double a, double b) { return a - b; });
    Field d = map_fields(u, v, [](double a, double b) { return a - b; });
    const double lhs =
        volume_integral_mapped(dstar, [s](double x) { return std::pow(std::abs(x), s); });
    const double rhs = volume_integral_mapped(d, [s](double x) { return std::pow(std::abs(x), s); });
    return InequalityReport::make(lhs, rhs, s, {"contraction"});
}

InequalityReport energy_comparison(const Field& field, const Weight& weight) {
    auto star = schwarz_rearrange(field);
    const double lhs = weighted_dirichlet_energy(star.field, weight);
    const double rhs = weighted_dirichlet_energy(field, weight);
    return InequalityReport::make(lhs, rhs, weight.gamma, {"polya-szego"});
}

double radial_decay_check(const RearrangedField& rearranged, const Weight& weight) {
    if (weight.profile == Weight::Profile::PowerOnePlus && weight.gamma < 2.0)
        throw AdmissibilityError("radial_decay_check: requires gamma >= 2");
    const double norm = std::sqrt(weighted_dirichlet_energy(rearranged.field, weight));
    if (!(norm > 0.0)) throw ArgumentError("radial_decay_check: zero-norm field");
    const AxisymGrid& g = rearranged.field.grid();
    const double expo = 0.5 * (g.N - 1);
    double sup = 0.0;
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i <= g.nr; ++i) {
            const double r = g.r[std::size_t(i)];
            if (r < 0.25 * g.R) continue;
            sup = std::max(sup, std::abs(rearranged.field(i, j)) * std::pow(r, expo) / norm);
        }
    return sup;
}

} // namespace hvlab
