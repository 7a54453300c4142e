#pragma once

#include <vector>

#include "hvlab/grid.hpp"

namespace hvlab {

/// Assembled bilinear-element stiffness for the form integral rho |grad u|^2
/// on the axisymmetric cells, restricted to the degrees of freedom (nodes
/// with r < R and z < H pinned to zero; the z = 0 row is free). u^T K u is
/// the discrete weighted Dirichlet energy. Nine-point stencil per node,
/// matrix-free apply over rows.
class WeightedStiffness {
  public:
    WeightedStiffness(GridPtr grid, const Weight& weight);

    const AxisymGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    /// out = K u (u assumed zero on pinned nodes; out zeroed there).
    void apply(const double* u, double* out) const;
    void apply(const Field& u, Field& out) const { apply(u.data(), out.data()); }

    const std::vector<double>& diagonal() const { return diag_; }
    /// Zero the pinned entries of x in place.
    void mask(double* x) const;

  private:
    GridPtr grid_;
    std::vector<double> coef_; ///< 9 per node, (dj+1)*3 + (di+1)
    std::vector<double> diag_;
};

struct PcgResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients, deterministic reductions.
/// x holds the initial guess on entry and the solution on exit.
PcgResult pcg_solve(const WeightedStiffness& K, const std::vector<double>& b,
                    std::vector<double>& x, double rel_tol, int max_iter);

/// Deterministic dot product on raw grid-shaped arrays.
double det_dot(const AxisymGrid& g, const double* x, const double* y);

} // namespace hvlab
