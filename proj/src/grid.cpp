#include "hvlab/grid.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hvlab {

DiffTables DiffTables::build(int n, double h) {
    DiffTables t;
    t.n = n;
    t.fwd_idx.assign(3 * std::size_t(n + 1), 0);
    t.fwd_w.assign(3 * std::size_t(n + 1), 0.0);
    t.adj_idx.assign(5 * std::size_t(n + 1), 0);
    t.adj_w.assign(5 * std::size_t(n + 1), 0.0);

    const double c = 1.0 / (2.0 * h);
    auto set_fwd = [&](int i, int slot, int idx, double w) {
        t.fwd_idx[3 * std::size_t(i) + std::size_t(slot)] = idx;
        t.fwd_w[3 * std::size_t(i) + std::size_t(slot)] = w;
    };
    for (int i = 0; i <= n; ++i) {
        if (i == 0) {
            set_fwd(i, 0, 0, -3.0 * c);
            set_fwd(i, 1, 1, 4.0 * c);
            set_fwd(i, 2, 2, -1.0 * c);
        } else if (i == n) {
            set_fwd(i, 0, n - 2, 1.0 * c);
            set_fwd(i, 1, n - 1, -4.0 * c);
            set_fwd(i, 2, n, 3.0 * c);
        } else {
            set_fwd(i, 0, i - 1, -c);
            set_fwd(i, 1, i + 1, c);
            set_fwd(i, 2, i, 0.0);
        }
    }
    // adjoint: node k is read by at most the stencils at i in [k-2, k+2]
    for (int k = 0; k <= n; ++k) {
        int slot = 0;
        for (int i = std::max(0, k - 2); i <= std::min(n, k + 2); ++i) {
            double w = 0.0;
            for (int s = 0; s < 3; ++s) {
                if (t.fwd_idx[3 * std::size_t(i) + std::size_t(s)] == k)
                    w += t.fwd_w[3 * std::size_t(i) + std::size_t(s)];
            }
            if (w != 0.0) {
                t.adj_idx[5 * std::size_t(k) + std::size_t(slot)] = i;
                t.adj_w[5 * std::size_t(k) + std::size_t(slot)] = w;
                ++slot;
            }
        }
    }
    return t;
}

GridPtr make_grid(int N, double R, double H, int nr, int nz) {
    if (N < 3) throw ArgumentError("make_grid: N must be >= 3");
    if (!(R > 0.0) || !(H > 0.0)) throw ArgumentError("make_grid: R and H must be positive");
    if (nr < 8 || nz < 8) throw ArgumentError("make_grid: need at least 8 cells per direction");

    auto g = std::make_shared<AxisymGrid>();
    g->N = N;
    g->R = R;
    g->H = H;
    g->nr = nr;
    g->nz = nz;
    g->hr = R / nr;
    g->hz = H / nz;
    g->sigma = sphere_surface_measure(N - 2);

    g->r.resize(std::size_t(nr + 1));
    for (int i = 0; i <= nr; ++i) g->r[std::size_t(i)] = i * g->hr;
    g->z.resize(std::size_t(nz + 1));
    for (int j = 0; j <= nz; ++j) g->z[std::size_t(j)] = j * g->hz;

    // radial weights: c_i = int phi_i(r) r^(N-2) dr, exact power moments
    const int k = N - 2;
    auto mom = [k](double a, double b, int kk) {
        return (std::pow(b, kk + 1) - std::pow(a, kk + 1)) / (kk + 1);
    };
    g->cr.assign(std::size_t(nr + 1), 0.0);
    for (int i = 0; i <= nr; ++i) {
        double c = 0.0;
        if (i > 0) {
            const double a = g->r[std::size_t(i - 1)], b = g->r[std::size_t(i)];
            c += (mom(a, b, k + 1) - a * mom(a, b, k)) / g->hr;
        }
        if (i < nr) {
            const double a = g->r[std::size_t(i)], b = g->r[std::size_t(i + 1)];
            c += (b * mom(a, b, k) - mom(a, b, k + 1)) / g->hr;
        }
        g->cr[std::size_t(i)] = c;
    }

    g->dz_w.assign(std::size_t(nz + 1), g->hz);
    g->dz_w.front() = 0.5 * g->hz;
    g->dz_w.back() = 0.5 * g->hz;

    // radial cell moments for the bilinear energy, exact in r^(N-2)
    g->cell_ia.assign(std::size_t(nr), 0.0);
    g->cell_i20.assign(std::size_t(nr), 0.0);
    g->cell_i11.assign(std::size_t(nr), 0.0);
    g->cell_i02.assign(std::size_t(nr), 0.0);
    for (int i = 0; i < nr; ++i) {
        const double a = g->r[std::size_t(i)], b = g->r[std::size_t(i + 1)];
        const double m0 = mom(a, b, k);
        const double m1 = mom(a, b, k + 1);
        const double m2 = mom(a, b, k + 2);
        const double h = g->hr;
        // s = (r-a)/h, 1-s = (b-r)/h
        const double i02 = (m2 - 2.0 * a * m1 + a * a * m0) / (h * h);
        const double i20 = (m2 - 2.0 * b * m1 + b * b * m0) / (h * h);
        const double i11 = ((a + b) * m1 - m2 - a * b * m0) / (h * h);
        g->cell_ia[std::size_t(i)] = m0;
        g->cell_i20[std::size_t(i)] = i20;
        g->cell_i11[std::size_t(i)] = i11;
        g->cell_i02[std::size_t(i)] = i02;
    }

    g->dr_tab = DiffTables::build(nr, g->hr);
    g->dz_tab = DiffTables::build(nz, g->hz);
    return g;
}

double volume_integral(const Field& f) {
    return volume_integral_mapped(f, [](double v) { return v; });
}

double boundary_integral(const Field& f) {
    return boundary_integral_mapped(f, [](double v) { return v; });
}

void apply_dr(const AxisymGrid& g, const double* u, double* out) {
    const int nr = g.nr, nz = g.nz;
    const int* idx = g.dr_tab.fwd_idx.data();
    const double* w = g.dr_tab.fwd_w.data();
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (int j = 0; j <= nz; ++j) {
        const double* row = u + std::size_t(j) * (nr + 1);
        double* orow = out + std::size_t(j) * (nr + 1);
        for (int i = 0; i <= nr; ++i) {
            const std::size_t b = 3 * std::size_t(i);
            orow[i] = w[b] * row[idx[b]] + w[b + 1] * row[idx[b + 1]] + w[b + 2] * row[idx[b + 2]];
        }
    }
}

void apply_dz(const AxisymGrid& g, const double* u, double* out) {
    const int nr = g.nr, nz = g.nz;
    const int* idx = g.dz_tab.fwd_idx.data();
    const double* w = g.dz_tab.fwd_w.data();
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (int j = 0; j <= nz; ++j) {
        const std::size_t b = 3 * std::size_t(j);
        const double* r0 = u + std::size_t(idx[b]) * (nr + 1);
        const double* r1 = u + std::size_t(idx[b + 1]) * (nr + 1);
        const double* r2 = u + std::size_t(idx[b + 2]) * (nr + 1);
        const double w0 = w[b], w1 = w[b + 1], w2 = w[b + 2];
        double* orow = out + std::size_t(j) * (nr + 1);
        for (int i = 0; i <= nr; ++i) orow[i] = w0 * r0[i] + w1 * r1[i] + w2 * r2[i];
    }
}

void apply_dr_adjoint(const AxisymGrid& g, const double* v, double* out) {
    const int nr = g.nr, nz = g.nz;
    const int* idx = g.dr_tab.adj_idx.data();
    const double* w = g.dr_tab.adj_w.data();
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (int j = 0; j <= nz; ++j) {
        const double* row = v + std::size_t(j) * (nr + 1);
        double* orow = out + std::size_t(j) * (nr + 1);
        for (int i = 0; i <= nr; ++i) {
            const std::size_t b = 5 * std::size_t(i);
            double s = 0.0;
            for (int t = 0; t < 5; ++t) s += w[b + std::size_t(t)] * row[idx[b + std::size_t(t)]];
            orow[i] = s;
        }
    }
}

void apply_dz_adjoint(const AxisymGrid& g, const double* v, double* out) {
    const int nr = g.nr, nz = g.nz;
    const int* idx = g.dz_tab.adj_idx.data();
    const double* w = g.dz_tab.adj_w.data();
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (int j = 0; j <= nz; ++j) {
        const std::size_t b = 5 * std::size_t(j);
        double* orow = out + std::size_t(j) * (nr + 1);
        for (int i = 0; i <= nr; ++i) orow[i] = 0.0;
        for (int t = 0; t < 5; ++t) {
            const double wt = w[b + std::size_t(t)];
            if (wt == 0.0) continue;
            const double* row = v + std::size_t(idx[b + std::size_t(t)]) * (nr + 1);
            for (int i = 0; i <= nr; ++i) orow[i] += wt * row[i];
        }
    }
}

GradientPair gradient(const Field& f) {
    GradientPair g{Field(f.grid_ptr()), Field(f.grid_ptr())};
    apply_dr(f.grid(), f.data(), g.dr.data());
    apply_dz(f.grid(), f.data(), g.dz.data());
    return g;
}

double cell_row_rho(const AxisymGrid& g, const Weight& weight, int j) {
    const double zc = g.z[std::size_t(j)] + 0.5 * g.hz;
    const double off = 0.5 * g.hz / std::sqrt(3.0);
    return 0.5 * (weight.eval(zc - off) + weight.eval(zc + off));
}

namespace {

// Exact per-cell energy of the bilinear interpolant:
//   d0 = u10-u00, d1 = u11-u01 (radial jumps), e0 = u01-u00, e1 = u11-u10.
//   int r^(N-2)(du/dr)^2 = (ia hz/hr^2)(d0^2+d0 d1+d1^2)/3
//   int r^(N-2)(du/dz)^2 = (1/hz)(e0^2 i20 + 2 e0 e1 i11 + e1^2 i02)
double energy_reduce_cells(const Field& f, const Weight& weight, bool radial_part,
                           bool vertical_part) {
    const AxisymGrid& g = f.grid();
    const double* u = f.data();
    const int nr = g.nr;
    const double total = reduce_over_rows(g.nz, [&](int j) {
        const double* row0 = u + g.idx(0, j);
        const double* row1 = u + g.idx(0, j + 1);
        double s = 0.0;
        for (int i = 0; i < nr; ++i) {
            double cell = 0.0;
            if (radial_part) {
                const double d0 = row0[i + 1] - row0[i];
                const double d1 = row1[i + 1] - row1[i];
                cell += g.cell_ia[std::size_t(i)] * g.hz / (g.hr * g.hr) *
                        (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
            }
            if (vertical_part) {
                const double e0 = row1[i] - row0[i];
                const double e1 = row1[i + 1] - row0[i + 1];
                cell += (e0 * e0 * g.cell_i20[std::size_t(i)] +
                         2.0 * e0 * e1 * g.cell_i11[std::size_t(i)] +
                         e1 * e1 * g.cell_i02[std::size_t(i)]) /
                        g.hz;
            }
            s += cell;
        }
        return g.sigma * cell_row_rho(g, weight, j) * s;
    });
    if (!std::isfinite(total)) throw NumericsError("weighted_dirichlet_energy: non-finite value");
    return total;
}

} // namespace

double weighted_dirichlet_energy(const Field& f, const Weight& weight) {
    return energy_reduce_cells(f, weight, true, true);
}

std::pair<double, double> weighted_energy_components(const Field& f, const Weight& weight) {
    return {energy_reduce_cells(f, weight, true, false),
            energy_reduce_cells(f, weight, false, true)};
}

double lp_norm_volume(const Field& f, double p) {
    if (p < 1.0) throw ArgumentError("lp_norm_volume: p must be >= 1");
    const double s = volume_integral_mapped(f, [p](double v) { return std::pow(std::abs(v), p); });
    return std::pow(s, 1.0 / p);
}

double lq_norm_boundary(const Field& f, double q) {
    if (q < 1.0) throw ArgumentError("lq_norm_boundary: q must be >= 1");
    const double s = boundary_integral_mapped(f, [q](double v) { return std::pow(std::abs(v), q); });
    return std::pow(s, 1.0 / q);
}

namespace gauss {
// 8-point Gauss-Legendre on [0,1]
constexpr int kN1 = 8;
constexpr double kX1[kN1] = {0.01985507175123188, 0.10166676129318664, 0.2372337950418355,
                             0.40828267875217505, 0.5917173212478249,  0.7627662049581645,
                             0.8983332387068134,  0.9801449282487681};
constexpr double kW1[kN1] = {0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                             0.18134189168918097, 0.18134189168918097, 0.15685332293894363,
                             0.11119051722668724, 0.05061426814518813};
// 4-point Gauss-Legendre on [0,1]
constexpr int kN2 = 4;
constexpr double kX2[kN2] = {0.06943184420297371, 0.33000947820757187, 0.6699905217924281,
                             0.9305681557970262};
constexpr double kW2[kN2] = {0.17392742256872692, 0.32607257743127305, 0.32607257743127305,
                             0.17392742256872692};
} // namespace gauss

double boundary_lq_mass_interp(const Field& f, double q) {
    if (q < 1.0) throw ArgumentError("boundary_lq_mass_interp: q must be >= 1");
    const AxisymGrid& g = f.grid();
    const int k = g.N - 2;
    double total = 0.0;
    for (int i = 0; i < g.nr; ++i) {
        const double a = f(i, 0), b = f(i + 1, 0);
        const double r0 = g.r[std::size_t(i)];
        double s = 0.0;
        for (int t = 0; t < gauss::kN1; ++t) {
            const double x = gauss::kX1[t];
            const double v = (1.0 - x) * a + x * b;
            s += gauss::kW1[t] * std::pow(std::abs(v), q) * std::pow(r0 + x * g.hr, k);
        }
        total += s * g.hr;
    }
    total *= g.sigma;
    if (!std::isfinite(total)) throw NumericsError("boundary_lq_mass_interp: non-finite value");
    return total;
}

double volume_lp_mass_interp(const Field& f, double p) {
    if (p < 1.0) throw ArgumentError("volume_lp_mass_interp: p must be >= 1");
    const AxisymGrid& g = f.grid();
    const int k = g.N - 2;
    const double* u = f.data();
    const int nr = g.nr;
    const double total = reduce_over_rows(g.nz, [&](int j) {
        const double* row0 = u + g.idx(0, j);
        const double* row1 = u + g.idx(0, j + 1);
        double s = 0.0;
        for (int i = 0; i < nr; ++i) {
            const double r0 = g.r[std::size_t(i)];
            double cell = 0.0;
            for (int tr = 0; tr < gauss::kN2; ++tr) {
                const double x = gauss::kX2[tr];
                const double rk = std::pow(r0 + x * g.hr, k);
                const double lo = (1.0 - x) * row0[i] + x * row0[i + 1];
                const double hi = (1.0 - x) * row1[i] + x * row1[i + 1];
                double zq = 0.0;
                for (int tz = 0; tz < gauss::kN2; ++tz) {
                    const double y = gauss::kX2[tz];
                    const double v = (1.0 - y) * lo + y * hi;
                    zq += gauss::kW2[tz] * std::pow(std::abs(v), p);
                }
                cell += gauss::kW2[tr] * rk * zq;
            }
            s += cell;
        }
        return g.sigma * g.hr * g.hz * s;
    });
    if (!std::isfinite(total)) throw NumericsError("volume_lp_mass_interp: non-finite value");
    return total;
}

double taper_factor(const AxisymGrid& g, double r, double z) {
    auto ramp = [](double s) {
        if (s >= 1.0) return 1.0;
        if (s <= 0.0) return 0.0;
        return 0.5 * (1.0 - std::cos(M_PI * s));
    };
    return ramp((g.R - r) / (0.1 * g.R)) * ramp((g.H - z) / (0.1 * g.H));
}

Field interpolate_analytic(const GridPtr& grid, const std::function<double(double, double)>& f,
                           bool taper) {
    Field out(grid);
    const AxisymGrid& g = *grid;
    for (int j = 0; j <= g.nz; ++j) {
        for (int i = 0; i <= g.nr; ++i) {
            double v = f(g.r[std::size_t(i)], g.z[std::size_t(j)]);
            if (!std::isfinite(v)) throw NumericsError("interpolate_analytic: non-finite sample");
            if (taper) v *= taper_factor(g, g.r[std::size_t(i)], g.z[std::size_t(j)]);
            out(i, j) = v;
        }
    }
    if (taper) apply_truncation_mask(out);
    return out;
}

void scale_field(Field& a, double c) {
    double* x = a.data();
    const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (std::int64_t k = 0; k < n; ++k) x[k] *= c;
}

void axpy(Field& a, double c, const Field& b) {
    if (!a.same_grid(b)) throw ArgumentError("axpy: grid mismatch");
    double* x = a.data();
    const double* y = b.data();
    const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (std::int64_t k = 0; k < n; ++k) x[k] += c * y[k];
}

double dot(const Field& a, const Field& b) {
    if (!a.same_grid(b)) throw ArgumentError("dot: grid mismatch");
    const AxisymGrid& g = a.grid();
    const double* x = a.data();
    const double* y = b.data();
    const int nr = g.nr;
    return reduce_over_rows(g.nz + 1, [&](int j) {
        const std::size_t off = g.idx(0, j);
        double s = 0.0;
        for (int i = 0; i <= nr; ++i) s += x[off + std::size_t(i)] * y[off + std::size_t(i)];
        return s;
    });
}

double max_abs(const Field& f) {
    const double* x = f.data();
    double m = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(x[k]));
    return m;
}

double min_value(const Field& f) {
    const double* x = f.data();
    double m = x[0];
    for (std::size_t k = 1; k < f.size(); ++k) m = std::min(m, x[k]);
    return m;
}

bool all_finite(const Field& f) {
    const double* x = f.data();
    for (std::size_t k = 0; k < f.size(); ++k)
        if (!std::isfinite(x[k])) return false;
    return true;
}

void project_nonnegative(Field& f) {
    double* x = f.data();
    const std::int64_t n = static_cast<std::int64_t>(f.size());
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (std::int64_t k = 0; k < n; ++k)
        if (x[k] < 0.0) x[k] = 0.0;
}

void apply_truncation_mask(Field& f) {
    const AxisymGrid& g = f.grid();
    for (int j = 0; j <= g.nz; ++j) f(g.nr, j) = 0.0;
    for (int i = 0; i <= g.nr; ++i) f(i, g.nz) = 0.0;
}

std::string snapshot_to_string(const Field& f) {
    const AxisymGrid& g = f.grid();
    std::string out;
    out.reserve(f.size() * 26 + 128);
    char buf[160];
    std::snprintf(buf, sizeof buf, "AXISYM N=%d R=%.17g H=%.17g nr=%d nz=%d sigma=%.17g\n", g.N,
                  g.R, g.H, g.nr, g.nz, g.sigma);
    out += buf;
    for (int j = 0; j <= g.nz; ++j) {
        for (int i = 0; i <= g.nr; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", f(i, j));
            if (i) out += ' ';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void write_snapshot(const Field& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ArgumentError("write_snapshot: cannot open " + path);
    os << snapshot_to_string(f);
}

Field snapshot_from_string(const std::string& text) {
    std::istringstream is(text);
    std::string header;
    if (!std::getline(is, header)) throw ArgumentError("snapshot: empty input");
    int N = 0, nr = 0, nz = 0;
    double R = 0, H = 0, sigma = 0;
    if (std::sscanf(header.c_str(), "AXISYM N=%d R=%lg H=%lg nr=%d nz=%d sigma=%lg", &N, &R, &H,
                    &nr, &nz, &sigma) != 6)
        throw ArgumentError("snapshot: malformed header");
    GridPtr g = make_grid(N, R, H, nr, nz);
    Field f(g);
    for (int j = 0; j <= nz; ++j) {
        for (int i = 0; i <= nr; ++i) {
            double v;
            if (!(is >> v)) throw ArgumentError("snapshot: truncated value table");
            f(i, j) = v;
        }
    }
    return f;
}

Field read_snapshot(const std::string& path) {
    std::ifstream isf(path, std::ios::binary);
    if (!isf) throw ArgumentError("read_snapshot: cannot open " + path);
    std::ostringstream ss;
    ss << isf.rdbuf();
    return snapshot_from_string(ss.str());
}

} // namespace hvlab
