#include "hvlab/pohozaev.hpp"

#include <cmath>
#include <limits>

#include "hvlab/errors.hpp"

namespace hvlab {

namespace {

struct Integrals {
    double dirichlet_w = 0.0;  ///< int rho |grad u|^2 (nodal FD quadrature)
    double dirichlet_wz = 0.0; ///< int rho'(z) z |grad u|^2
    double vol_p = 0.0;        ///< int |u|^p
    double bd_q = 0.0;         ///< int_bd |u|^q
    double tail_max = 0.0;     ///< worst outer-band fraction among the four
};

void validate_weight(const Weight& w, bool allow_constant) {
    if (w.profile == Weight::Profile::PowerOnePlus) {
        if (w.gamma == 0.0 && !allow_constant)
            throw AdmissibilityError("(rho_1) fails: constant weight has rho' = 0");
        return;
    }
    // tabulated: spot-check (rho_1) on a few positive samples
    Rho1Check c = check_rho1(w, {0.25, 0.5, 1.0, 2.0, 4.0, 8.0});
    if (!c.holds) throw AdmissibilityError("(rho_1) fails for the tabulated weight");
}

Integrals compute_integrals(const Field& u, const ProblemParams& params, const Weight& w) {
    const AxisymGrid& g = u.grid();
    auto grads = gradient(u);
    const double* dr = grads.dr.data();
    const double* dz = grads.dz.data();

    double tot[4] = {0, 0, 0, 0};
    double band[4] = {0, 0, 0, 0};
    const double r_cut = 0.9 * g.R, z_cut = 0.9 * g.H;

    for (int j = 0; j <= g.nz; ++j) {
        const double z = g.z[std::size_t(j)];
        const double rho = w.eval(z);
        const double rhoz = w.derivative(z) * z;
        const double wj = g.sigma * g.dz_w[std::size_t(j)];
        for (int i = 0; i <= g.nr; ++i) {
            const std::size_t off = g.idx(i, j);
            const double cw = wj * g.cr[std::size_t(i)];
            const double g2 = dr[off] * dr[off] + dz[off] * dz[off];
            const double uu = std::abs(u(i, j));
            const double vals[4] = {cw * rho * g2, cw * rhoz * g2,
                                    cw * std::pow(uu, params.p),
                                    j == 0 ? g.sigma * g.cr[std::size_t(i)] * std::pow(uu, params.q)
                                           : 0.0};
            const bool in_band = g.r[std::size_t(i)] > r_cut || z > z_cut;
            for (int t = 0; t < 4; ++t) {
                tot[t] += vals[t];
                if (in_band) band[t] += vals[t];
            }
        }
    }
    Integrals out;
    out.dirichlet_w = tot[0];
    out.dirichlet_wz = tot[1];
    out.vol_p = tot[2];
    out.bd_q = tot[3];
    for (int t = 0; t < 4; ++t)
        if (tot[t] != 0.0) out.tail_max = std::max(out.tail_max, std::abs(band[t] / tot[t]));
    if (!std::isfinite(out.dirichlet_w + out.dirichlet_wz + out.vol_p + out.bd_q))
        throw NumericsError("pohozaev_eval: non-finite quadrature");
    return out;
}

} // namespace

PohozaevReport pohozaev_eval(const Field& field, const ProblemParams& params,
                             const Weight& weight) {
    validate_weight(weight, /*allow_constant=*/true);
    const int N = params.N;
    const Integrals I = compute_integrals(field, params, weight);

    PohozaevReport rep;
    rep.lhs_main = 0.5 * (N - 2) * I.dirichlet_w;
    rep.lhs_weight = 0.5 * I.dirichlet_wz;
    rep.rhs_volume = N * params.a / params.p * I.vol_p;
    rep.rhs_boundary = (N - 1) * params.b / params.q * I.bd_q;
    rep.residual = (rep.lhs_main + rep.lhs_weight) - (rep.rhs_volume + rep.rhs_boundary);
    const double scale = std::max({std::abs(rep.lhs_main), std::abs(rep.rhs_volume),
                                   std::abs(rep.rhs_boundary),
                                   std::numeric_limits<double>::epsilon()});
    rep.relative_residual = rep.residual / scale;

    auto [A, B] = criticality_coefficients(N, params.p, params.q);
    rep.relation_lhs = rep.lhs_weight;
    rep.relation_rhs = params.a * A * I.vol_p + params.b * B * I.bd_q;
    rep.tail_fraction_max = I.tail_max;
    rep.tail_warning = I.tail_max > 0.01;
    return rep;
}

std::pair<double, double> criticality_coefficients(int N, double p, double q) {
    if (N < 3) throw DimensionError("criticality_coefficients: N must be >= 3");
    if (!(p > 1.0) || !(q > 1.0))
        throw ArgumentError("criticality_coefficients: p, q must exceed 1");
    return {N / p - 0.5 * (N - 2), (N - 1) / q - 0.5 * (N - 2)};
}

std::pair<Rational, Rational> criticality_coefficients(int N, const Rational& p,
                                                       const Rational& q) {
    if (N < 3) throw DimensionError("criticality_coefficients: N must be >= 3");
    const Rational A = Rational(N) / p - Rational(N - 2, 2);
    const Rational B = Rational(N - 1) / q - Rational(N - 2, 2);
    return {A, B};
}

NonexistenceProbe nonexistence_probe(const Field& field, const ProblemParams& params,
                                     const Weight& weight) {
    validate_weight(weight, /*allow_constant=*/false);
    const Integrals I = compute_integrals(field, params, weight);
    auto [A, B] = criticality_coefficients(params.N, params.p, params.q);

    NonexistenceProbe probe;
    probe.A = A;
    probe.B = B;
    probe.obstruction_value = 0.5 * I.dirichlet_wz;
    probe.relation_residual =
        std::abs(probe.obstruction_value - (params.a * A * I.vol_p + params.b * B * I.bd_q));
    return probe;
}

} // namespace hvlab
