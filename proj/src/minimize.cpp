#include "hvlab/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hvlab/bumps.hpp"
#include "hvlab/linsolve.hpp"

namespace hvlab {

namespace {

void validate_exponent(const GridPtr& grid, const MinimizeConfig& c) {
    const auto [ts, tl] = critical_exponents(grid->N);
    const double hi = c.constraint == ConstraintKind::BoundaryLq ? tl.value() : ts.value();
    if (!(c.exponent >= 2.0) || !(c.exponent <= hi + 1e-12))
        throw AdmissibilityError("minimize: constraint exponent outside [2, critical]");
}

} // namespace

double constraint_norm(const Field& field, const MinimizeConfig& config) {
    return config.constraint == ConstraintKind::BoundaryLq
               ? lq_norm_boundary(field, config.exponent)
               : lp_norm_volume(field, config.exponent);
}

double rayleigh_quotient(const Field& field, const MinimizeConfig& config) {
    const double cn = constraint_norm(field, config);
    if (!(cn > 0.0)) throw ArgumentError("rayleigh_quotient: zero constraint norm");
    return weighted_dirichlet_energy(field, config.weight) / (cn * cn);
}

Field default_initial_field(const GridPtr& grid, const MinimizeConfig& config) {
    InstantonParams bubble{InstantonParams::Kind::BoundaryBubble, 1.0, 1.0};
    Field f = interpolate_analytic(
        grid, [&](double r, double z) { return instanton_eval(bubble, grid->N, r, z); }, true);
    const double cn = constraint_norm(f, config);
    scale_field(f, 1.0 / cn);
    return f;
}

namespace {

/// Fraction of the constraint-norm mass in the 5% of cells nearest the origin.
double concentration_index_of(const Field& u, const MinimizeConfig& config) {
    const AxisymGrid& g = u.grid();
    const double q = config.exponent;
    if (config.constraint == ConstraintKind::BoundaryLq) {
        const int k = std::max(1, int(std::ceil(0.05 * (g.nr + 1))));
        double near = 0.0, total = 0.0;
        for (int i = 0; i <= g.nr; ++i) {
            const double m = g.cr[std::size_t(i)] * std::pow(std::abs(u(i, 0)), q);
            total += m;
            if (i < k) near += m;
        }
        return total > 0.0 ? near / total : 0.0;
    }
    struct Cell {
        double d2, mass;
    };
    std::vector<Cell> cells;
    cells.reserve(u.size());
    double total = 0.0;
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i <= g.nr; ++i) {
            const double m = g.sigma * g.cr[std::size_t(i)] * g.dz_w[std::size_t(j)] *
                             std::pow(std::abs(u(i, j)), q);
            const double r = g.r[std::size_t(i)], z = g.z[std::size_t(j)];
            cells.push_back({r * r + z * z, m});
            total += m;
        }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.d2 < b.d2; });
    const std::size_t k = std::max<std::size_t>(1, cells.size() / 20);
    double near = 0.0;
    for (std::size_t t = 0; t < k; ++t) near += cells[t].mass;
    return total > 0.0 ? near / total : 0.0;
}

/// Conforming constraint norm: the interpolant's own L^q mass.
double conforming_norm(const Field& f, const MinimizeConfig& config) {
    const double mass = config.constraint == ConstraintKind::BoundaryLq
                            ? boundary_lq_mass_interp(f, config.exponent)
                            : volume_lp_mass_interp(f, config.exponent);
    return std::pow(mass, 1.0 / config.exponent);
}

namespace gauss {
constexpr int kN1 = 8;
constexpr double kX1[kN1] = {0.01985507175123188, 0.10166676129318664, 0.2372337950418355,
                             0.40828267875217505, 0.5917173212478249,  0.7627662049581645,
                             0.8983332387068134,  0.9801449282487681};
constexpr double kW1[kN1] = {0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                             0.18134189168918097, 0.18134189168918097, 0.15685332293894363,
                             0.11119051722668724, 0.05061426814518813};
constexpr int kN2 = 4;
constexpr double kX2[kN2] = {0.06943184420297371, 0.33000947820757187, 0.6699905217924281,
                             0.9305681557970262};
constexpr double kW2[kN2] = {0.17392742256872692, 0.32607257743127305, 0.32607257743127305,
                             0.17392742256872692};
} // namespace gauss

/// d/du of the conforming constraint norm at norm 1, assembled nodally.
void conforming_norm_derivative(const Field& u, const MinimizeConfig& config,
                                std::vector<double>& out) {
    const AxisymGrid& g = u.grid();
    const double q = config.exponent;
    const int k = g.N - 2;
    std::fill(out.begin(), out.end(), 0.0);
    if (config.constraint == ConstraintKind::BoundaryLq) {
        for (int i = 0; i < g.nr; ++i) {
            const double a = u(i, 0), b = u(i + 1, 0);
            const double r0 = g.r[std::size_t(i)];
            double da = 0.0, db = 0.0;
            for (int t = 0; t < gauss::kN1; ++t) {
                const double x = gauss::kX1[t];
                const double v = (1.0 - x) * a + x * b;
                const double w = gauss::kW1[t] * std::pow(r0 + x * g.hr, k) *
                                 std::pow(std::abs(v), q - 2.0) * v;
                da += w * (1.0 - x);
                db += w * x;
            }
            out[g.idx(i, 0)] += g.sigma * g.hr * da;
            out[g.idx(i + 1, 0)] += g.sigma * g.hr * db;
        }
        return;
    }
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const double r0 = g.r[std::size_t(i)];
            const double u00 = u(i, j), u10 = u(i + 1, j), u01 = u(i, j + 1), u11 = u(i + 1, j + 1);
            double d[4] = {0, 0, 0, 0};
            for (int tr = 0; tr < gauss::kN2; ++tr) {
                const double x = gauss::kX2[tr];
                const double rk = std::pow(r0 + x * g.hr, k);
                for (int tz = 0; tz < gauss::kN2; ++tz) {
                    const double y = gauss::kX2[tz];
                    const double v = (1.0 - x) * (1.0 - y) * u00 + x * (1.0 - y) * u10 +
                                     (1.0 - x) * y * u01 + x * y * u11;
                    const double w = gauss::kW2[tr] * gauss::kW2[tz] * rk *
                                     std::pow(std::abs(v), q - 2.0) * v;
                    d[0] += w * (1.0 - x) * (1.0 - y);
                    d[1] += w * x * (1.0 - y);
                    d[2] += w * (1.0 - x) * y;
                    d[3] += w * x * y;
                }
            }
            const double fac = g.sigma * g.hr * g.hz;
            out[g.idx(i, j)] += fac * d[0];
            out[g.idx(i + 1, j)] += fac * d[1];
            out[g.idx(i, j + 1)] += fac * d[2];
            out[g.idx(i + 1, j + 1)] += fac * d[3];
        }
}

struct RunOutcome {
    MinimizeResult result;
};

RunOutcome run_descent(const GridPtr& grid, const MinimizeConfig& config,
                       const WeightedStiffness& K, Field u) {
    const AxisymGrid& g = *grid;
    apply_truncation_mask(u);
    {
        const double cn = conforming_norm(u, config);
        if (!(cn > 0.0)) throw ArgumentError("minimize: initial field has zero constraint norm");
        scale_field(u, 1.0 / cn);
    }

    double E = weighted_dirichlet_energy(u, config.weight);

    std::vector<double> ell(g.num_nodes(), 0.0);
    std::vector<double> dC(g.num_nodes(), 0.0);
    std::vector<double> gdir(g.num_nodes(), 0.0);
    Field ku(grid);

    MinimizeResult res;
    res.converged = false;
    res.value_trace.push_back(E);

    int it = 0;
    double gnorm = std::numeric_limits<double>::infinity();
    for (; it < config.max_iters; ++it) {
        // residual of the quotient at constraint norm 1: 2 K u - 2 E dC
        K.apply(u, ku);
        conforming_norm_derivative(u, config, dC);
        for (std::size_t t = 0; t < ell.size(); ++t)
            ell[t] = 2.0 * (ku.values()[t] - E * dC[t]);
        K.mask(ell.data());

        // Riesz representative in the weighted H1 metric, warm-started
        auto cg = pcg_solve(K, ell, gdir, config.cg_tol, config.cg_max_iter);
        if (!cg.converged) throw SolverError("minimize: stiffness solve failed to converge");
        gnorm = std::sqrt(std::max(0.0, det_dot(g, gdir.data(), ell.data())));
        if (gnorm < config.grad_tol) {
            res.converged = true;
            break;
        }

        // fixed initial step, halve on increase
        double step = config.step;
        bool accepted = false;
        Field trial(grid);
        for (int h = 0; h < 60; ++h) {
            trial.values() = u.values();
            for (std::size_t t = 0; t < trial.size(); ++t) trial.values()[t] -= step * gdir[t];
            apply_truncation_mask(trial);
            const double cn = conforming_norm(trial, config);
            if (cn > 0.0) {
                scale_field(trial, 1.0 / cn);
                const double Et = weighted_dirichlet_energy(trial, config.weight);
                if (Et < E) {
                    u = trial;
                    E = Et;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) break; // stalled: gradient tolerance decides convergence below
        res.value_trace.push_back(E);
    }

    res.best_value = E;
    res.minimizer = u;
    res.iterations = it;
    res.grad_norm_final = gnorm;
    res.converged = res.converged || gnorm < config.grad_tol;
    res.concentration_index = concentration_index_of(u, config);
    // expose the minimizer at nodal constraint norm 1 (the public convention)
    const double cn_nodal = constraint_norm(res.minimizer, config);
    if (cn_nodal > 0.0) scale_field(res.minimizer, 1.0 / cn_nodal);
    return {res};
}

} // namespace

MinimizeResult minimize(const GridPtr& grid, const MinimizeConfig& config) {
    validate_exponent(grid, config);
    WeightedStiffness K(grid, config.weight);

    std::vector<Field> starts;
    if (config.initial) {
        starts.push_back(*config.initial);
    } else {
        starts.push_back(default_initial_field(grid, config));
        BumpOptions opts;
        for (int s = 1; s < config.multistart; ++s) {
            std::mt19937_64 rng(config.seed ^ (0xd1342543de82ef95ULL * std::uint64_t(s)));
            starts.push_back(random_bump_field(grid, rng, opts));
        }
    }

    std::optional<MinimizeResult> best;
    for (auto& s : starts) {
        auto out = run_descent(grid, config, K, std::move(s));
        const MinimizeResult& r = out.result;
        if (!best || r.best_value < best->best_value ||
            (r.best_value == best->best_value && r.grad_norm_final < best->grad_norm_final)) {
            best = r;
        }
    }
    if (!best->converged)
        throw MinimizeMaxIter("minimize: gradient tolerance not reached", *best);
    return *best;
}

std::vector<RescaleSample> rescale_diagnostic(const Field& field, const Weight& weight,
                                              const std::vector<double>& deltas) {
    // u_delta(x', z) = u(delta x', z). At q = 2 the substitution x' -> x'/delta
    // cancels the delta^-(N-1) Jacobian between the energy and the boundary
    // norm, leaving quotient(delta) = (delta^2 Er + Ez) / ||u||_{2,bd}^2 with
    // the integrals of the original field. Evaluating this identity instead of
    // regridding keeps the diagnostic free of truncation cliffs at small delta
    // (the rescaled support would leave the box).
    const double bn = lq_norm_boundary(field, 2.0);
    if (!(bn > 0.0)) throw ArgumentError("rescale_diagnostic: zero boundary trace");
    const auto [er, ez] = weighted_energy_components(field, weight);

    std::vector<RescaleSample> out;
    for (double delta : deltas) {
        if (!(delta > 0.0)) throw ArgumentError("rescale_diagnostic: delta must be positive");
        RescaleSample s;
        s.delta = delta;
        const double radial = delta * delta * er;
        s.quotient = (radial + ez) / (bn * bn);
        s.radial_share = radial / (radial + ez);
        out.push_back(s);
    }
    return out;
}

ConcentrationFit concentration_diagnostic(const MinimizeResult& result,
                                          const std::vector<double>& eps_grid) {
    if (eps_grid.empty()) throw ArgumentError("concentration_diagnostic: empty epsilon grid");
    const Field& m = result.minimizer;
    if (!(max_abs(m) > 0.0)) throw ArgumentError("concentration_diagnostic: zero minimizer");
    const GridPtr& grid = m.grid_ptr();
    const double mm = volume_integral_mapped(m, [](double v) { return v * v; });

    ConcentrationFit fit;
    fit.fit_error = std::numeric_limits<double>::infinity();
    // bubbles narrower than two cells alias to a nodal spike and make the
    // argmin meaningless; fit only against resolvable members of the family
    const double eps_floor = 2.0 * std::max(grid->hr, grid->hz);
    for (double eps : eps_grid) {
        if (eps < eps_floor) continue;
        InstantonParams bp{InstantonParams::Kind::BoundaryBubble, eps, 1.0};
        Field b = interpolate_analytic(
            grid, [&](double r, double z) { return instanton_eval(bp, grid->N, r, z); }, true);
        const double bb = volume_integral_mapped(b, [](double v) { return v * v; });
        Field prod = map_fields(m, b, [](double a, double c) { return a * c; });
        const double mb = volume_integral(prod);
        if (!(bb > 0.0)) continue;
        const double lam = mb / bb;
        // ||m - lam b||^2 = mm - 2 lam mb + lam^2 bb
        const double err2 = std::max(0.0, mm - 2.0 * lam * mb + lam * lam * bb);
        const double rel = std::sqrt(err2 / mm);
        if (rel < fit.fit_error) {
            fit.fit_error = rel;
            fit.best_fit_eps = eps;
        }
    }
    return fit;
}

} // namespace hvlab
