#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hvlab/core_math.hpp"
#include "hvlab/errors.hpp"
#include "hvlab/grid.hpp"

namespace hvlab {

enum class ConstraintKind { BoundaryLq, VolumeLp };

struct MinimizeConfig {
    ConstraintKind constraint = ConstraintKind::BoundaryLq;
    double exponent = 2.0;
    Weight weight;
    double step = 0.5;
    int max_iters = 500;
    double grad_tol = 1e-6;
    std::uint64_t seed = 1;
    int multistart = 1;
    std::optional<Field> initial; ///< overrides the built-in starts when set
    double cg_tol = 1e-10;
    int cg_max_iter = 50000;
};

struct MinimizeResult {
    double best_value = 0.0;
    Field minimizer; ///< constraint norm 1
    int iterations = 0;
    double grad_norm_final = 0.0;
    double concentration_index = 0.0;
    bool converged = false;
    std::vector<double> value_trace; ///< accepted quotient values, nonincreasing
};

/// Non-convergence carrier: best run so far rides along.
struct MinimizeMaxIter : MaxIterError {
    MinimizeResult best;
    MinimizeMaxIter(const std::string& msg, MinimizeResult b)
        : MaxIterError(msg), best(std::move(b)) {}
};

/// Weighted Dirichlet energy over the squared constraint norm.
double rayleigh_quotient(const Field& field, const MinimizeConfig& config);

double constraint_norm(const Field& field, const MinimizeConfig& config);

/// Projected descent on the constraint manifold, steepest descent in the
/// rho-weighted H1 metric (one stiffness solve per step), fixed initial step
/// with backtracking halving, renormalization each accepted step. Multistarts
/// from a tapered boundary bubble plus seeded random bumps; winner by lowest
/// value, then lowest gradient norm.
MinimizeResult minimize(const GridPtr& grid, const MinimizeConfig& config);

struct RescaleSample {
    double delta = 0.0;
    double quotient = 0.0;     ///< q = 2 boundary Rayleigh quotient of u(delta r, z)
    double radial_share = 0.0; ///< radial fraction of the weighted gradient energy
};

/// Samples u(delta r, z) by radial linear interpolation (zero beyond the
/// grid) and reports the q = 2 boundary quotient and the radial-energy share.
std::vector<RescaleSample> rescale_diagnostic(const Field& field, const Weight& weight,
                                              const std::vector<double>& deltas);

struct ConcentrationFit {
    double best_fit_eps = 0.0;
    double fit_error = 0.0; ///< relative L2(volume) error of the best fit
};

/// Least-squares fit of the minimizer against tapered boundary-bubble
/// interpolants over the given epsilon grid.
ConcentrationFit concentration_diagnostic(const MinimizeResult& result,
                                          const std::vector<double>& eps_grid);

/// Standard initial field: tapered boundary bubble, epsilon 1, normalized.
Field default_initial_field(const GridPtr& grid, const MinimizeConfig& config);

} // namespace hvlab
