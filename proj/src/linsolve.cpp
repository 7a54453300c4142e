#include "hvlab/linsolve.hpp"

#include <cmath>

namespace hvlab {

WeightedStiffness::WeightedStiffness(GridPtr grid, const Weight& weight) : grid_(std::move(grid)) {
    const AxisymGrid& g = *grid_;
    const int nr = g.nr, nz = g.nz;
    coef_.assign(9 * g.num_nodes(), 0.0);

    // local corner order: 00, 10, 01, 11
    const int loc_di[4] = {0, 1, 0, 1};
    const int loc_dj[4] = {0, 0, 1, 1};

    for (int j = 0; j < nz; ++j) {
        const double fac = g.sigma * cell_row_rho(g, weight, j);
        for (int i = 0; i < nr; ++i) {
            const double ar = fac * g.cell_ia[std::size_t(i)] * g.hz / (3.0 * g.hr * g.hr);
            const double a20 = fac * g.cell_i20[std::size_t(i)] / g.hz;
            const double a11 = fac * g.cell_i11[std::size_t(i)] / g.hz;
            const double a02 = fac * g.cell_i02[std::size_t(i)] / g.hz;

            // d0 = u10-u00, d1 = u11-u01, e0 = u01-u00, e1 = u11-u10
            const double B1[4] = {-1, 1, 0, 0};
            const double B2[4] = {0, 0, -1, 1};
            const double C1[4] = {-1, 0, 1, 0};
            const double C2[4] = {0, -1, 0, 1};
            double loc[4][4];
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    loc[a][b] = ar * (B1[a] * B1[b] + B2[a] * B2[b] +
                                      0.5 * (B1[a] * B2[b] + B2[a] * B1[b])) +
                                a20 * C1[a] * C1[b] + a02 * C2[a] * C2[b] +
                                a11 * (C1[a] * C2[b] + C2[a] * C1[b]);

            for (int a = 0; a < 4; ++a) {
                const std::size_t node = g.idx(i + loc_di[a], j + loc_dj[a]);
                for (int b = 0; b < 4; ++b) {
                    const int di = loc_di[b] - loc_di[a];
                    const int dj = loc_dj[b] - loc_dj[a];
                    coef_[9 * node + std::size_t((dj + 1) * 3 + (di + 1))] += loc[a][b];
                }
            }
        }
    }

    diag_.assign(g.num_nodes(), 0.0);
    for (std::size_t k = 0; k < g.num_nodes(); ++k) diag_[k] = coef_[9 * k + 4];
    mask(diag_.data());
    for (std::size_t k = 0; k < diag_.size(); ++k)
        if (diag_[k] <= 0.0) diag_[k] = 1.0;
}

void WeightedStiffness::mask(double* x) const {
    const AxisymGrid& g = *grid_;
    for (int j = 0; j <= g.nz; ++j) x[g.idx(g.nr, j)] = 0.0;
    for (int i = 0; i <= g.nr; ++i) x[g.idx(i, g.nz)] = 0.0;
}

void WeightedStiffness::apply(const double* u, double* out) const {
    const AxisymGrid& g = *grid_;
    const int nr = g.nr, nz = g.nz;
    const int stride = nr + 1;
    const double* cf = coef_.data();

#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (int j = 0; j <= nz; ++j) {
        double* orow = out + std::size_t(j) * stride;
        const bool has_dn = j > 0, has_up = j < nz;
        for (int i = 0; i <= nr; ++i) {
            const std::size_t node = std::size_t(j) * stride + std::size_t(i);
            const double* c = cf + 9 * node;
            const double* mid = u + node;
            double s = c[4] * mid[0];
            if (i > 0) s += c[3] * mid[-1];
            if (i < nr) s += c[5] * mid[1];
            if (has_dn) {
                const double* dn = mid - stride;
                s += c[1] * dn[0];
                if (i > 0) s += c[0] * dn[-1];
                if (i < nr) s += c[2] * dn[1];
            }
            if (has_up) {
                const double* up = mid + stride;
                s += c[7] * up[0];
                if (i > 0) s += c[6] * up[-1];
                if (i < nr) s += c[8] * up[1];
            }
            orow[i] = s;
        }
    }
    mask(out);
}

double det_dot(const AxisymGrid& g, const double* x, const double* y) {
    const int nr = g.nr;
    return reduce_over_rows(g.nz + 1, [&](int j) {
        const std::size_t off = g.idx(0, j);
        double s = 0.0;
        for (int i = 0; i <= nr; ++i) s += x[off + std::size_t(i)] * y[off + std::size_t(i)];
        return s;
    });
}

PcgResult pcg_solve(const WeightedStiffness& K, const std::vector<double>& b,
                    std::vector<double>& x, double rel_tol, int max_iter) {
    const AxisymGrid& g = K.grid();
    const std::int64_t n = static_cast<std::int64_t>(g.num_nodes());
    const double* dg = K.diagonal().data();

    std::vector<double> r(b.size()), zv(b.size()), p(b.size()), q(b.size());
    PcgResult res;

    const double nb = std::sqrt(det_dot(g, b.data(), b.data()));
    if (nb == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        res.converged = true;
        return res;
    }

    K.apply(x.data(), q.data());
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (std::int64_t k = 0; k < n; ++k) r[std::size_t(k)] = b[std::size_t(k)] - q[std::size_t(k)];
    K.mask(r.data());

#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (std::int64_t k = 0; k < n; ++k) zv[std::size_t(k)] = r[std::size_t(k)] / dg[k];
    p = zv;
    double rz = det_dot(g, r.data(), zv.data());

    for (int it = 0; it < max_iter; ++it) {
        const double rn = std::sqrt(det_dot(g, r.data(), r.data()));
        res.relative_residual = rn / nb;
        if (rn <= rel_tol * nb) {
            res.converged = true;
            res.iterations = it;
            return res;
        }
        K.apply(p.data(), q.data());
        const double pq = det_dot(g, p.data(), q.data());
        if (!(pq > 0.0)) throw SolverError("pcg_solve: operator lost positive definiteness");
        const double alpha = rz / pq;
#pragma omp parallel for schedule(static) if (parallel_enabled())
        for (std::int64_t k = 0; k < n; ++k) {
            x[std::size_t(k)] += alpha * p[std::size_t(k)];
            r[std::size_t(k)] -= alpha * q[std::size_t(k)];
        }
#pragma omp parallel for schedule(static) if (parallel_enabled())
        for (std::int64_t k = 0; k < n; ++k) zv[std::size_t(k)] = r[std::size_t(k)] / dg[k];
        const double rz_next = det_dot(g, r.data(), zv.data());
        const double beta = rz_next / rz;
        rz = rz_next;
#pragma omp parallel for schedule(static) if (parallel_enabled())
        for (std::int64_t k = 0; k < n; ++k)
            p[std::size_t(k)] = zv[std::size_t(k)] + beta * p[std::size_t(k)];
        res.iterations = it + 1;
    }
    res.converged = res.relative_residual <= rel_tol;
    return res;
}

} // namespace hvlab
