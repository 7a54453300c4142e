#include "hvlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "hvlab/bumps.hpp"

namespace hvlab {

namespace {

double sgn_pow(double v, double e) { return std::pow(std::abs(v), e - 1.0) * (v < 0 ? -1.0 : 1.0); }

/// Assembled weak-form residual l(u): <l, phi> = I'(u)[phi] for nodal phi.
void assemble_residual(const Field& u, const ProblemParams& params, const WeightedStiffness& K,
                       std::vector<double>& ell, Field& scratch) {
    const AxisymGrid& g = u.grid();
    K.apply(u, scratch);
    std::copy(scratch.values().begin(), scratch.values().end(), ell.begin());
    if (params.a != 0.0) {
        for (int j = 0; j <= g.nz; ++j)
            for (int i = 0; i <= g.nr; ++i) {
                const double v = u(i, j);
                if (v != 0.0)
                    ell[g.idx(i, j)] -= params.a * g.sigma * g.cr[std::size_t(i)] *
                                        g.dz_w[std::size_t(j)] * sgn_pow(v, params.p);
            }
    }
    if (params.b != 0.0) {
        for (int i = 0; i <= g.nr; ++i) {
            const double v = u(i, 0);
            if (v != 0.0)
                ell[g.idx(i, 0)] -= params.b * g.sigma * g.cr[std::size_t(i)] * sgn_pow(v, params.q);
        }
    }
    K.mask(ell.data());
}

} // namespace

EnergySplit energy(const Field& field, const ProblemParams& params, const Weight& weight) {
    if (!(params.p > 1.0) || !(params.q > 1.0)) throw ArgumentError("energy: p, q must exceed 1");
    EnergySplit e;
    e.dirichlet = 0.5 * weighted_dirichlet_energy(field, weight);
    const double q = params.q, p = params.p;
    e.boundary_term =
        params.b / q * boundary_integral_mapped(field, [q](double v) { return std::pow(std::abs(v), q); });
    e.volume_term =
        params.a / p * volume_integral_mapped(field, [p](double v) { return std::pow(std::abs(v), p); });
    e.total = e.dirichlet - e.boundary_term - e.volume_term;
    return e;
}

EnergyGradient energy_gradient(const Field& field, const ProblemParams& params,
                               const Weight& weight) {
    WeightedStiffness K(field.grid_ptr(), weight);
    std::vector<double> warm(field.size(), 0.0);
    return energy_gradient(field, params, K, warm, 1e-10, 50000);
}

EnergyGradient energy_gradient(const Field& field, const ProblemParams& params,
                               const WeightedStiffness& K, std::vector<double>& warm,
                               double cg_tol, int cg_max_iter) {
    const AxisymGrid& g = field.grid();
    std::vector<double> ell(g.num_nodes(), 0.0);
    Field scratch(field.grid_ptr());
    assemble_residual(field, params, K, ell, scratch);

    auto cg = pcg_solve(K, ell, warm, cg_tol, cg_max_iter);
    if (!cg.converged) throw SolverError("energy_gradient: stiffness solve did not converge");

    EnergyGradient out;
    out.direction = Field(field.grid_ptr());
    out.direction.values() = warm;
    out.residual_norm = std::sqrt(std::max(0.0, det_dot(g, warm.data(), ell.data())));
    return out;
}

double weak_residual(const Field& field, const ProblemParams& params, const Weight& weight,
                     const std::vector<Field>& test_suite) {
    if (test_suite.empty()) throw ArgumentError("weak_residual: empty test suite");
    const AxisymGrid& g = field.grid();
    WeightedStiffness K(field.grid_ptr(), weight);
    std::vector<double> ell(g.num_nodes(), 0.0);
    Field scratch(field.grid_ptr());
    assemble_residual(field, params, K, ell, scratch);

    const double unorm = std::sqrt(weighted_dirichlet_energy(field, weight));
    const double scale = std::max(1.0, unorm);
    double worst = 0.0;
    for (const Field& phi : test_suite) {
        if (!phi.same_grid(field)) throw ArgumentError("weak_residual: suite grid mismatch");
        const double pairing = det_dot(g, ell.data(), phi.data());
        const double pn = std::sqrt(weighted_dirichlet_energy(phi, weight));
        if (pn > 0.0) worst = std::max(worst, std::abs(pairing) / (pn * scale));
    }
    return worst;
}

std::vector<Field> weak_test_suite(const GridPtr& grid, int count, std::uint64_t seed) {
    BumpOptions opts;
    opts.center_box = 0.45;
    opts.width_lo = 0.03;
    opts.width_hi = 0.10;
    return bump_suite(grid, count, seed, opts);
}

SolveRegime classify_regime(const ProblemParams& params, double gamma) {
    const double ts = critical_exponents(params.N).first.value();
    const double tl = critical_exponents(params.N).second.value();
    const double a = params.a, b = params.b, p = params.p, q = params.q;

    if (b > 0.0 && std::abs(q - tl) < 1e-12) return SolveRegime::CriticalTrace;
    if (a > 0.0 && std::abs(p - ts) < 1e-12) return SolveRegime::CriticalVolume;
    if (a <= 0.0 && b > 0.0 && p > 1.0 && q > std::max(2.0, p) && q < tl && gamma > 1.0)
        return SolveRegime::BoundaryDriven;
    if (a > 0.0 && b > 0.0 && p == 2.0 && q > 2.0 && q < tl && gamma > 2.0 &&
        a < 0.25 * (gamma - 1.0) * (gamma - 1.0))
        return SolveRegime::BorderlineVolume;
    if (a > 0.0 && b > 0.0 && q == 2.0 && p > 2.0 && p < ts && gamma > 2.0 &&
        b < 0.5 * (gamma - 1.0))
        return SolveRegime::BorderlineTrace;
    if (a > 0.0 && b > 0.0 && p > 2.0 && p < ts && q > 2.0 && q < tl && gamma > 2.0)
        return SolveRegime::DoublyPositive;
    if (a > 0.0 && b <= 0.0 && q > 1.0 && p > std::max(2.0, q) && p < ts && gamma > 2.0)
        return SolveRegime::VolumeDriven;
    throw ArgumentError("mountain_pass_solve: parameters match no supported existence regime");
}

namespace {

double power_gamma(const Weight& w) {
    return w.profile == Weight::Profile::PowerOnePlus ? w.gamma : 2.0;
}

/// argmax over t > 0 of I(t v) = t^2/2 E - (b/q) t^q Bq - (a/p) t^p Ap, by
/// bracketed bisection on the derivative. Returns 0 when no interior maximum
/// exists (degenerate direction).
double ray_maximum(const Field& v, const ProblemParams& params, const Weight& weight) {
    const double E = weighted_dirichlet_energy(v, weight);
    if (!(E > 0.0)) return 0.0;
    const double q = params.q, p = params.p;
    const double Bq =
        boundary_integral_mapped(v, [q](double x) { return std::pow(std::abs(x), q); });
    const double Ap =
        volume_integral_mapped(v, [p](double x) { return std::pow(std::abs(x), p); });
    auto dphi = [&](double t) {
        return t * E - params.b * std::pow(t, q - 1.0) * Bq - params.a * std::pow(t, p - 1.0) * Ap;
    };
    double lo = 1e-9;
    if (!(dphi(lo) > 0.0)) return 0.0;
    double hi = 1.0;
    int guard = 0;
    while (dphi(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 200) return 0.0;
    }
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (dphi(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Coercivity precondition for the borderline regimes: the shifted quadratic
/// form must stay positive on the test suite.
void check_borderline_coercivity(SolveRegime regime, const ProblemParams& params,
                                 const Weight& weight, const GridPtr& grid, std::uint64_t seed) {
    if (regime != SolveRegime::BorderlineVolume && regime != SolveRegime::BorderlineTrace) return;
    auto suite = weak_test_suite(grid, 30, seed ^ 0x5bd1e995u);
    for (const Field& phi : suite) {
        const double en = weighted_dirichlet_energy(phi, weight);
        double shifted = en;
        if (regime == SolveRegime::BorderlineVolume) {
            shifted -= params.a * volume_integral_mapped(phi, [](double v) { return v * v; });
        } else {
            shifted -= params.b * boundary_integral_mapped(phi, [](double v) { return v * v; });
        }
        if (!(shifted > 0.0))
            throw AdmissibilityError("mountain_pass_solve: shifted norm not positive on suite");
    }
}

double path_energy(const Field& f, const ProblemParams& params, const Weight& weight) {
    return energy(f, params, weight).total;
}

} // namespace

SolveResult mountain_pass_solve(const ProblemParams& params, const Weight& weight,
                                const GridPtr& grid, const SolverConfig& config) {
    const SolveRegime regime = classify_regime(params, power_gamma(weight));
    check_borderline_coercivity(regime, params, weight, grid, config.seed);
    const int M = std::max(5, config.path_nodes);

    WeightedStiffness K(grid, weight);

    // unit-energy bump direction: compact, boundary-hugging, order-one scale
    // so the weighted energy and the boundary norm are comparable
    Field w = interpolate_analytic(
        grid, [](double r, double z) { return std::exp(-(r * r + z * z)); }, true);
    {
        const double n = std::sqrt(weighted_dirichlet_energy(w, weight));
        scale_field(w, 1.0 / n);
    }

    // far endpoint: double t until I < -1
    double tstar = 1.0;
    for (int k = 0; k < 60; ++k) {
        Field e = w;
        scale_field(e, tstar);
        if (path_energy(e, params, weight) < -1.0) break;
        tstar *= 2.0;
        if (k == 59) throw SolverError("mountain_pass_solve: no negative-energy endpoint found");
    }

    // ring detection: peak of I along the ray, then a safety factor
    double tpeak = tstar, ipeak = -std::numeric_limits<double>::infinity();
    for (double t = tstar; t > 1e-6 * tstar; t *= 0.75) {
        Field e = w;
        scale_field(e, t);
        const double val = path_energy(e, params, weight);
        if (val > ipeak) {
            ipeak = val;
            tpeak = t;
        }
    }
    double r0 = 0.25 * tpeak;
    double c0 = 0.0;
    {
        BumpOptions opts;
        opts.center_box = 0.4;
        for (int attempt = 0; attempt < 20; ++attempt) {
            auto ring = bump_suite(grid, 50, config.seed ^ 0xa5a5a5a5u, opts);
            double lo = std::numeric_limits<double>::infinity();
            for (Field& f : ring) {
                const double n = std::sqrt(weighted_dirichlet_energy(f, weight));
                scale_field(f, r0 / n);
                lo = std::min(lo, path_energy(f, params, weight));
            }
            if (lo > 0.0) {
                c0 = 0.5 * lo;
                break;
            }
            r0 *= 0.5;
        }
        if (!(c0 > 0.0))
            throw SolverError("mountain_pass_solve: could not certify a positive ring level");
    }

    // initial path: the ray from 0 to the endpoint
    std::vector<Field> path;
    path.reserve(std::size_t(M));
    for (int k = 0; k < M; ++k) {
        Field f = w;
        scale_field(f, tstar * double(k) / double(M - 1));
        path.push_back(std::move(f));
    }
    std::vector<double> vals(static_cast<std::size_t>(M), 0.0);
    for (int k = 0; k < M; ++k) vals[std::size_t(k)] = path_energy(path[std::size_t(k)], params, weight);

    auto argmax_interior = [&]() {
        int k = 1;
        for (int t = 2; t < M - 1; ++t)
            if (vals[std::size_t(t)] > vals[std::size_t(k)]) k = t;
        return k;
    };

    SolveResult res;
    res.params = params;
    res.weight = weight;
    res.ring_radius = r0;
    res.ring_level = c0;

    std::vector<double> warm(grid->num_nodes(), 0.0);
    // degeneration floor: well below the certified ring level so a healthy
    // minimax level never trips it, while a degenerating path (critical
    // regimes) slides through it on its way to zero
    const double collapse_floor = 1e-3 * c0;
    double prev_max = std::numeric_limits<double>::infinity();
    double gnorm = std::numeric_limits<double>::infinity();
    int it = 0;
    int last_k = 1;

    auto rho_dist = [&](const Field& a, const Field& b) {
        Field d = map_fields(a, b, [](double x, double y) { return x - y; });
        return std::sqrt(weighted_dirichlet_energy(d, weight));
    };

    // one backtracking descent on node k; returns false when fully stalled.
    // The saddle's unstable direction runs along the path, so the maximizer
    // moves by the gradient component perpendicular to the path tangent
    // (rho metric); sliding along the ridge is left to the argmax selection
    // and the re-parameterization. The full dual residual still decides
    // convergence, so accepted solutions are genuine critical points.
    auto descend_node = [&](int k) {
        Field& u = path[std::size_t(k)];
        auto eg = energy_gradient(u, params, K, warm, config.cg_tol, config.cg_max_iter);
        gnorm = eg.residual_norm;
        if (gnorm < config.grad_tol) return false;

        Field tangent = map_fields(path[std::size_t(k + 1)], path[std::size_t(k - 1)],
                                   [](double a, double b) { return a - b; });
        Field dir = eg.direction;
        {
            // rho inner products via the stiffness pairing
            Field ktan(u.grid_ptr());
            K.apply(tangent, ktan);
            const double tt = dot(tangent, ktan);
            if (tt > 0.0) {
                const double gt = dot(dir, ktan);
                axpy(dir, -gt / tt, tangent);
            }
        }
        const double dir_norm2 = [&]() {
            Field kd(u.grid_ptr());
            K.apply(dir, kd);
            return dot(dir, kd);
        }();
        if (!(dir_norm2 > 0.0)) return false;

        // limit the move to about half the local node spacing
        const double spacing = std::min(rho_dist(u, path[std::size_t(k - 1)]),
                                        rho_dist(u, path[std::size_t(k + 1)]));
        double step = std::min(1.0, 0.5 * spacing / std::sqrt(dir_norm2));
        for (int h = 0; h < 60; ++h) {
            Field cand = u;
            axpy(cand, -step, dir);
            project_nonnegative(cand);
            apply_truncation_mask(cand);
            const double val = path_energy(cand, params, weight);
            if (val < vals[std::size_t(k)]) {
                u = std::move(cand);
                vals[std::size_t(k)] = val;
                return true;
            }
            step *= 0.5;
        }
        return false;
    };

    const bool verbose = []() {
        const char* v = std::getenv("HVLAB_SOLVER_TRACE");
        return v && *v == '1';
    }();

    for (; it < config.max_iters; ++it) {
        if (verbose && it % 50 == 0) {
            std::fprintf(stderr, "it=%d gnorm=%.3g max=%.6g argmax=%d\n", it, gnorm,
                         *std::max_element(vals.begin() + 1, vals.end() - 1), argmax_interior());
        }
        // re-parameterize by arc length in the rho-norm; this keeps the path
        // taut across the ridge as the maximizer is pulled down
        if (it > 0 && it % config.reparam_every == 0) {
            std::vector<double> arc(static_cast<std::size_t>(M), 0.0);
            for (int k = 1; k < M; ++k)
                arc[std::size_t(k)] = arc[std::size_t(k - 1)] +
                                      rho_dist(path[std::size_t(k)], path[std::size_t(k - 1)]);
            if (arc.back() > 0.0) {
                std::vector<Field> np;
                np.reserve(std::size_t(M));
                std::vector<double> nv(static_cast<std::size_t>(M), 0.0);
                for (int k = 0; k < M; ++k) {
                    const double target = arc.back() * double(k) / double(M - 1);
                    int seg = 1;
                    while (seg < M - 1 && arc[std::size_t(seg)] < target) ++seg;
                    const double lo = arc[std::size_t(seg - 1)], hi = arc[std::size_t(seg)];
                    const double t = hi > lo ? (target - lo) / (hi - lo) : 0.0;
                    Field f = map_fields(path[std::size_t(seg - 1)], path[std::size_t(seg)],
                                         [t](double x, double y) { return (1.0 - t) * x + t * y; });
                    project_nonnegative(f);
                    apply_truncation_mask(f);
                    nv[std::size_t(k)] = path_energy(f, params, weight);
                    np.push_back(std::move(f));
                }
                path = std::move(np);
                vals = std::move(nv);
            }
        }

        int k = argmax_interior();
        last_k = k;
        bool moved = descend_node(k);
        if (gnorm < config.grad_tol) {
            res.converged = true;
            break;
        }
        if (!moved) break; // stalled against the path tangent: refine locally

        // resampling may have revealed a slightly higher ridge point; keep
        // descending until the recorded maximum is again nonincreasing
        for (int extra = 0; extra < 4 * M; ++extra) {
            const double cur = *std::max_element(vals.begin() + 1, vals.end() - 1);
            if (!(cur > prev_max)) break;
            k = argmax_interior();
            last_k = k;
            if (!descend_node(k)) break;
        }

        const double cur_max = *std::max_element(vals.begin() + 1, vals.end() - 1);
        // record only monotone-restored states; a resampling can transiently
        // reveal a better-sampled ridge point above the previous record
        if (cur_max <= prev_max) {
            res.path_max_history.push_back(cur_max);
            prev_max = cur_max;
        }

        if (cur_max < collapse_floor)
            throw SolverCollapse("mountain_pass_solve: path maximum fell below the ring level",
                                 cur_max, c0);

        // plateau: the path phase has localized the crossing; hand over to
        // the local refinement of the maximizer
        const std::size_t hs = res.path_max_history.size();
        if (hs >= 12) {
            const double then = res.path_max_history[hs - 11];
            if (cur_max > then - 1e-3 * std::abs(then)) {
                ++it;
                break;
            }
        }
    }

    // local minimax refinement: the saddle maximizes I along its own ray, so
    // iterate perpendicular-to-ray descent followed by exact ray
    // re-maximization; each accepted step strictly lowers I.
    Field u = path[std::size_t(argmax_interior())];
    if (!res.converged) {
        Field ku_loc(grid);
        // put the seed on its ray maximum first; the refinement then strictly
        // lowers the ray-max value toward the minimax level
        {
            const double t0 = ray_maximum(u, params, weight);
            if (t0 > 0.0) scale_field(u, t0);
        }
        double cur = path_energy(u, params, weight);
        for (; it < config.max_iters; ++it) {
            auto eg = energy_gradient(u, params, K, warm, config.cg_tol, config.cg_max_iter);
            gnorm = eg.residual_norm;
            if (gnorm < config.grad_tol) {
                res.converged = true;
                break;
            }
            Field dir = eg.direction;
            K.apply(u, ku_loc);
            const double uu = dot(u, ku_loc);
            if (uu > 0.0) axpy(dir, -dot(dir, ku_loc) / uu, u);

            double step = 1.0;
            bool accepted = false;
            for (int h = 0; h < 60; ++h) {
                Field cand = u;
                axpy(cand, -step, dir);
                project_nonnegative(cand);
                apply_truncation_mask(cand);
                const double tstar = ray_maximum(cand, params, weight);
                if (tstar > 0.0) {
                    scale_field(cand, tstar);
                    const double val = path_energy(cand, params, weight);
                    if (val < cur) {
                        u = std::move(cand);
                        cur = val;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if (!accepted) break;
            // the refinement tracks the ray-max value, which starts above the
            // discrete path maximum; append only once it rejoins the record
            if (res.path_max_history.empty() || cur <= res.path_max_history.back())
                res.path_max_history.push_back(cur);
            if (cur < collapse_floor)
                throw SolverCollapse("mountain_pass_solve: refinement level fell below the ring",
                                     cur, c0);
        }
    } else {
        u = path[std::size_t(last_k)];
    }

    res.solution = std::move(u);
    project_nonnegative(res.solution);
    res.level = path_energy(res.solution, params, weight);
    res.residual_norm = gnorm;
    res.iterations = it;
    res.converged = res.converged || gnorm < config.grad_tol;
    if (!res.converged)
        throw SolverMaxIter("mountain_pass_solve: residual tolerance not reached", res);
    return res;
}

RobinResiduals robin_transform_check(const Field& field, const ProblemParams& params,
                                     const Weight& weight) {
    if (weight.profile != Weight::Profile::PowerOnePlus || weight.gamma != 2.0)
        throw ArgumentError("robin_transform_check: requires the (1+z)^2 power weight");
    if (params.a != 0.0) throw ArgumentError("robin_transform_check: requires a = 0");
    const AxisymGrid& g = field.grid();

    Field v(field.grid_ptr());
    for (int j = 0; j <= g.nz; ++j)
        for (int i = 0; i <= g.nr; ++i) v(i, j) = (1.0 + g.z[std::size_t(j)]) * field(i, j);

    RobinResiduals out;
    // interior test region: away from axis, boundary and truncation
    const double hr = g.hr, hz = g.hz;
    for (int j = 1; j < g.nz; ++j) {
        const double z = g.z[std::size_t(j)];
        if (z < g.H / 16.0 || z > g.H / 2.0) continue;
        for (int i = 1; i < g.nr; ++i) {
            const double r = g.r[std::size_t(i)];
            if (r < g.R / 8.0 || r > g.R / 2.0) continue;
            const double vrr = (v(i + 1, j) - 2.0 * v(i, j) + v(i - 1, j)) / (hr * hr);
            const double vr = (v(i + 1, j) - v(i - 1, j)) / (2.0 * hr);
            const double vzz = (v(i, j + 1) - 2.0 * v(i, j) + v(i, j - 1)) / (hz * hz);
            const double lap = vrr + (g.N - 2) / r * vr + vzz;
            out.interior = std::max(out.interior, std::abs(lap));
        }
    }
    for (int i = 1; i < g.nr; ++i) {
        const double r = g.r[std::size_t(i)];
        if (r < g.R / 8.0 || r > g.R / 2.0) continue;
        const double dvz = (-3.0 * v(i, 0) + 4.0 * v(i, 1) - v(i, 2)) / (2.0 * hz);
        const double vb = v(i, 0);
        const double bc = -dvz + vb - params.b * sgn_pow(vb, params.q);
        out.boundary = std::max(out.boundary, std::abs(bc));
    }
    return out;
}

} // namespace hvlab
