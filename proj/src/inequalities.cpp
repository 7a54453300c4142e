#include "hvlab/inequalities.hpp"

#include <cmath>
#include <limits>

namespace hvlab {

InequalityReport InequalityReport::make(double lhs, double rhs, double constant,
                                        std::vector<std::string> tags) {
    InequalityReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.relative_slack = r.slack / std::max(std::abs(rhs), std::numeric_limits<double>::epsilon());
    r.constant_used = constant;
    r.tags = std::move(tags);
    return r;
}

namespace {

/// integral of w(z) * g(u) dmu with the nodal quadrature.
template <class W, class G>
double volume_integral_weighted(const Field& f, W&& wz, G&& g) {
    const AxisymGrid& gr = f.grid();
    const double* u = f.data();
    const double* cr = gr.cr.data();
    const int nr = gr.nr;
    const double total = reduce_over_rows(gr.nz + 1, [&](int j) {
        const double* row = u + gr.idx(0, j);
        double s = 0.0;
        for (int i = 0; i <= nr; ++i) s += cr[i] * g(row[i]);
        return gr.sigma * gr.dz_w[std::size_t(j)] * wz(gr.z[std::size_t(j)]) * s;
    });
    if (!std::isfinite(total)) throw NumericsError("quadrature: non-finite value");
    return total;
}

} // namespace

InequalityReport hardy_p_check(const Field& field, const Weight& weight, double p) {
    if (weight.profile != Weight::Profile::PowerOnePlus)
        throw ArgumentError("hardy_p_check: power weight required");
    const double gamma = weight.gamma;
    const double C = hardy_constant(p, gamma); // throws AdmissibilityError if inadmissible

    const double vol_term = volume_integral_weighted(
        field, [&](double z) { return std::pow(1.0 + z, gamma - p); },
        [&](double v) { return std::pow(std::abs(v), p); });
    const double bd_term =
        boundary_integral_mapped(field, [&](double v) { return std::pow(std::abs(v), p); });
    const double lhs = std::pow(C, p) * vol_term + std::pow(C, p - 1.0) * bd_term;

    auto grads = gradient(field);
    const AxisymGrid& g = field.grid();
    const double* dr = grads.dr.data();
    const double* dz = grads.dz.data();
    const double rhs = reduce_over_rows(g.nz + 1, [&](int j) {
        const std::size_t off = g.idx(0, j);
        double s = 0.0;
        for (int i = 0; i <= g.nr; ++i) {
            const double a = dr[off + std::size_t(i)];
            const double b = dz[off + std::size_t(i)];
            s += g.cr[std::size_t(i)] * std::pow(a * a + b * b, 0.5 * p);
        }
        return g.sigma * g.dz_w[std::size_t(j)] * std::pow(1.0 + g.z[std::size_t(j)], gamma) * s;
    });

    return InequalityReport::make(lhs, rhs, C, {"hardy-p"});
}

InequalityReport trace_l2_check(const Field& field, double gamma) {
    if (!(gamma > 1.0)) throw AdmissibilityError("trace_l2_check: requires gamma > 1");
    const double cst = 0.5 * (gamma - 1.0);
    const double lhs = cst * boundary_integral_mapped(field, [](double v) { return v * v; });
    const double rhs = weighted_dirichlet_energy(field, Weight::power(gamma));
    return InequalityReport::make(lhs, rhs, cst, {"trace-l2"});
}

TraceChainReport trace_lq_chain_check(const Field& field, double gamma, double q, double s_num) {
    if (gamma < 0.0) throw AdmissibilityError("trace_lq_chain_check: requires gamma >= 0");
    const double two_lower = critical_exponents(field.grid().N).second.value();
    if (!(q >= 2.0) || !(q <= two_lower + 1e-12))
        throw AdmissibilityError("trace_lq_chain_check: q outside [2, 2_*]");
    if (!(s_num > 0.0)) throw ArgumentError("trace_lq_chain_check: s_num must be positive");

    const double e0 = weighted_dirichlet_energy(field, Weight::power(0.0));
    const double ew = weighted_dirichlet_energy(field, Weight::power(gamma));

    TraceChainReport rep;
    const double bn_crit = lq_norm_boundary(field, two_lower);
    rep.trace_link =
        InequalityReport::make(s_num * bn_crit * bn_crit, e0, s_num, {"trace-critical"});
    rep.weight_link = InequalityReport::make(e0, ew, 1.0, {"weight-monotone"});

    if (q < two_lower - 1e-12) {
        if (!(gamma > 1.0))
            throw AdmissibilityError("trace_lq_chain_check: interpolated link needs gamma > 1");
        // 1/q = (1-theta)/2 + theta/2_*
        const double theta = (0.5 - 1.0 / q) / (0.5 - 1.0 / two_lower);
        const double c0 =
            std::pow(2.0 / (gamma - 1.0), 1.0 - theta) * std::pow(1.0 / s_num, theta);
        const double bq = lq_norm_boundary(field, q);
        rep.interp_link = InequalityReport::make(bq * bq, c0 * ew, c0, {"trace-interpolated"});
        rep.has_interp = true;
    }
    return rep;
}

std::vector<double> moser_ladder(int N, double zeta, int n_max) {
    const double two_star = critical_exponents(N).first.value();
    if (!(zeta >= 2.0) || !(zeta < two_star))
        throw AdmissibilityError("moser_ladder: requires 2 <= zeta < 2*");
    if (n_max < 1) throw ArgumentError("moser_ladder: n_max must be >= 1");
    std::vector<double> k(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n)
        k[static_cast<std::size_t>(n - 1)] = std::pow(two_star / zeta, n) - 1.0;
    return k;
}

std::vector<LadderEntry> ladder_supnorm_diagnostic(const Field& field, int N, double zeta,
                                                   int n_max) {
    constexpr double kExponentCap = 512.0;
    const double two_star = critical_exponents(N).first.value();
    const auto ks = moser_ladder(N, zeta, n_max);

    std::vector<LadderEntry> out;
    const double m = max_abs(field);
    for (double k : ks) {
        const double e = (k + 1.0) * two_star;
        if (e > kExponentCap) break;
        LadderEntry entry;
        entry.exponent = e;
        if (m > 0.0) {
            const double s =
                volume_integral_mapped(field, [&](double v) { return std::pow(std::abs(v) / m, e); });
            entry.norm = m * std::pow(s, 1.0 / e);
        }
        out.push_back(entry);
    }
    if (out.empty())
        throw ExponentCapError("ladder_supnorm_diagnostic: every rung exceeds exponent cap 512");
    return out;
}

} // namespace hvlab
