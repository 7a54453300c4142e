#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hvlab/core_math.hpp"
#include "hvlab/errors.hpp"
#include "hvlab/exec.hpp"

namespace hvlab {

/// One-dimensional difference operator on a uniform node line: second-order
/// central in the interior, one-sided second-order at the two ends. Stored as
/// flat stencil tables (forward: 3 taps per node, adjoint: 5 taps per node,
/// zero-padded) so both the apply and its transpose are branch-free loops.
struct DiffTables {
    int n = 0; ///< nodes are 0..n
    std::vector<int> fwd_idx;
    std::vector<double> fwd_w;
    std::vector<int> adj_idx;
    std::vector<double> adj_w;

    static DiffTables build(int n, double h);
};

/// Truncated axisymmetric rectangle [0,R] x [0,H] in (r, x_N) with the
/// measure sigma * r^(N-2) dr dz. Nodal quadrature weights are exact moments
/// of the P1 hat functions against r^(N-2), so polynomials of degree <= 1 in
/// each variable integrate exactly for every N and the axis r = 0 never
/// enters through a singular term.
struct AxisymGrid {
    int N = 3;
    double R = 1.0, H = 1.0;
    int nr = 8, nz = 8;
    double hr = 0.0, hz = 0.0;
    double sigma = 0.0; ///< |S^(N-2)|

    std::vector<double> r;    ///< node radii, size nr+1
    std::vector<double> z;    ///< node heights, size nz+1
    std::vector<double> cr;   ///< radial hat weights, int phi_i r^(N-2) dr
    std::vector<double> dz_w; ///< vertical trapezoid weights

    /// Exact radial cell moments against r^(N-2), s = (r - r_i)/hr on the cell:
    /// ia = int r^(N-2) dr, i20 = int (1-s)^2 r^(N-2) dr,
    /// i11 = int s(1-s) r^(N-2) dr, i02 = int s^2 r^(N-2) dr. Size nr.
    std::vector<double> cell_ia, cell_i20, cell_i11, cell_i02;

    DiffTables dr_tab;
    DiffTables dz_tab;

    std::size_t num_nodes() const { return std::size_t(nr + 1) * std::size_t(nz + 1); }
    std::size_t idx(int i, int j) const { return std::size_t(j) * (nr + 1) + i; }
};

using GridPtr = std::shared_ptr<const AxisymGrid>;

GridPtr make_grid(int N, double R, double H, int nr, int nz);

/// Nodal scalar field on an AxisymGrid. Row-major from z = 0 upward.
class Field {
  public:
    Field() = default;
    explicit Field(GridPtr grid, double fill = 0.0)
        : grid_(std::move(grid)), v_(grid_->num_nodes(), fill) {}

    const AxisymGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    bool same_grid(const Field& other) const { return grid_.get() == other.grid_.get(); }

    double& operator()(int i, int j) { return v_[grid_->idx(i, j)]; }
    double operator()(int i, int j) const { return v_[grid_->idx(i, j)]; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::size_t size() const { return v_.size(); }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

  private:
    GridPtr grid_;
    std::vector<double> v_;
};

/// Deterministic reduction: one partial per z-row, each row summed serially
/// left to right by a single thread, partials combined in fixed order. The
/// OpenMP and serial lanes produce bit-identical totals.
template <class PerRow>
double reduce_over_rows(int nrows, PerRow&& row_sum) {
    std::vector<double> partial(static_cast<std::size_t>(nrows));
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (int j = 0; j < nrows; ++j) partial[static_cast<std::size_t>(j)] = row_sum(j);
    double total = 0.0;
    for (int j = 0; j < nrows; ++j) total += partial[static_cast<std::size_t>(j)];
    return total;
}

// ---- quadrature ----

/// Integrates g(f_ij) against the volume measure without a temporary field.
template <class G>
double volume_integral_mapped(const Field& f, G&& g) {
    const AxisymGrid& gr = f.grid();
    const double* u = f.data();
    const double* cr = gr.cr.data();
    const int nr = gr.nr;
    const double total = reduce_over_rows(gr.nz + 1, [&](int j) {
        const double* row = u + gr.idx(0, j);
        double s = 0.0;
        for (int i = 0; i <= nr; ++i) s += cr[i] * g(row[i]);
        return gr.sigma * gr.dz_w[static_cast<std::size_t>(j)] * s;
    });
    if (!std::isfinite(total)) throw NumericsError("volume_integral: non-finite quadrature");
    return total;
}

double volume_integral(const Field& f);

template <class G>
double boundary_integral_mapped(const Field& f, G&& g) {
    const AxisymGrid& gr = f.grid();
    const double* row = f.data();
    double s = 0.0;
    for (int i = 0; i <= gr.nr; ++i) s += gr.cr[static_cast<std::size_t>(i)] * g(row[i]);
    const double total = gr.sigma * s;
    if (!std::isfinite(total)) throw NumericsError("boundary_integral: non-finite quadrature");
    return total;
}

double boundary_integral(const Field& f);

// ---- differential operators ----

struct GradientPair {
    Field dr;
    Field dz;
};

GradientPair gradient(const Field& f);

/// Raw applies into pre-sized buffers, for hot loops.
void apply_dr(const AxisymGrid& g, const double* u, double* out);
void apply_dz(const AxisymGrid& g, const double* u, double* out);
void apply_dr_adjoint(const AxisymGrid& g, const double* v, double* out);
void apply_dz_adjoint(const AxisymGrid& g, const double* v, double* out);

// ---- energies and norms ----

/// ||u||^2: the exact Dirichlet energy of the bilinear interpolant of the
/// nodal values, with rho replaced by its two-point Gauss average on each
/// cell row. Every discrete field is an admissible continuum trial function,
/// so Rayleigh quotients never dip below their continuum infima through
/// under-resolved concentration. Cell-row-factored accumulation: weighted and
/// unweighted values of one field compare monotonically in floating point
/// whenever rho >= 1.
double weighted_dirichlet_energy(const Field& f, const Weight& weight);

/// (integral rho |d_r u|^2, integral rho |d_z u|^2), same cell quadrature.
std::pair<double, double> weighted_energy_components(const Field& f, const Weight& weight);

/// Gauss average of rho over the z-extent of cell row j.
double cell_row_rho(const AxisymGrid& g, const Weight& weight, int j);

double lp_norm_volume(const Field& f, double p);
double lq_norm_boundary(const Field& f, double q);

/// Interpolant-based norm masses: integral of |bilinear interpolant|^p against
/// the cell measure, by fixed Gauss rules. Together with the interpolant
/// energy these make Rayleigh quotients conforming (the quotient of an
/// admissible continuum function), so minimization cannot tunnel below the
/// continuum infimum through quadrature bias at the lattice scale.
double volume_lp_mass_interp(const Field& f, double p);
double boundary_lq_mass_interp(const Field& f, double q);

// ---- construction ----

/// Sample f(r, z) at the nodes. With taper on, multiply by a smooth cosine
/// cutoff over the outermost 10% band in r and z so the field vanishes on
/// the truncation boundary.
Field interpolate_analytic(const GridPtr& grid, const std::function<double(double, double)>& f,
                           bool taper);

double taper_factor(const AxisymGrid& g, double r, double z);

// ---- elementwise helpers (deterministic, data-parallel) ----

template <class F>
Field map_field(const Field& a, F&& f) {
    Field out(a.grid_ptr());
    const double* x = a.data();
    double* y = out.data();
    const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (std::int64_t k = 0; k < n; ++k) y[k] = f(x[k]);
    return out;
}

template <class F>
Field map_fields(const Field& a, const Field& b, F&& f) {
    if (!a.same_grid(b)) throw ArgumentError("map_fields: grid mismatch");
    Field out(a.grid_ptr());
    const double* x = a.data();
    const double* y = b.data();
    double* o = out.data();
    const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for schedule(static) if (parallel_enabled())
    for (std::int64_t k = 0; k < n; ++k) o[k] = f(x[k], y[k]);
    return out;
}

void scale_field(Field& a, double c);
/// a += c*b
void axpy(Field& a, double c, const Field& b);
/// Deterministic dot product over all nodes (row partials).
double dot(const Field& a, const Field& b);
double max_abs(const Field& f);
double min_value(const Field& f);
bool all_finite(const Field& f);
/// Clamp negative values to zero in place.
void project_nonnegative(Field& f);
/// Zero the truncation rows r = R and z = H in place.
void apply_truncation_mask(Field& f);

// ---- snapshot I/O (ASCII, bit-reproducible) ----

void write_snapshot(const Field& f, const std::string& path);
Field read_snapshot(const std::string& path);
std::string snapshot_to_string(const Field& f);
Field snapshot_from_string(const std::string& text);

} // namespace hvlab
