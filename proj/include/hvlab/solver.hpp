#pragma once

#include <cstdint>
#include <vector>

#include "hvlab/core_math.hpp"
#include "hvlab/errors.hpp"
#include "hvlab/grid.hpp"
#include "hvlab/linsolve.hpp"

namespace hvlab {

struct EnergySplit {
    double dirichlet = 0.0;     ///< (1/2) ||u||^2
    double boundary_term = 0.0; ///< (b/q) int_bd |u|^q
    double volume_term = 0.0;   ///< (a/p) int |u|^p
    double total = 0.0;         ///< dirichlet - boundary_term - volume_term
};

EnergySplit energy(const Field& field, const ProblemParams& params, const Weight& weight);

struct EnergyGradient {
    Field direction;            ///< Riesz representative of I'(u) in the rho-H1 metric
    double residual_norm = 0.0; ///< ||I'(u)|| in the dual norm, = sqrt(<g, l>)
};

/// Solves (stiffness_rho) g = assembled weak-form residual of I at u.
EnergyGradient energy_gradient(const Field& field, const ProblemParams& params,
                               const Weight& weight);

/// Variant reusing an assembled stiffness (which carries the weight) and a
/// warm-start buffer.
EnergyGradient energy_gradient(const Field& field, const ProblemParams& params,
                               const WeightedStiffness& K, std::vector<double>& warm,
                               double cg_tol, int cg_max_iter);

/// max over the test suite of |<weak-form residual, phi>| / (||phi|| scale),
/// scale = max(1, ||u||).
double weak_residual(const Field& field, const ProblemParams& params, const Weight& weight,
                     const std::vector<Field>& test_suite);

/// Standard suite of tapered bumps supported in the inner half of the box.
std::vector<Field> weak_test_suite(const GridPtr& grid, int count, std::uint64_t seed);

enum class SolveRegime {
    BoundaryDriven,   ///< a <= 0, b > 0, max(2,p) < q < 2_*, gamma > 1
    DoublyPositive,   ///< a, b > 0, p in (2,2*), q in (2,2_*), gamma > 2
    VolumeDriven,     ///< a > 0, b <= 0, max(2,q) < p < 2*, gamma > 2
    BorderlineVolume, ///< p = 2, q in (2,2_*), 0 < a < (gamma-1)^2/4
    BorderlineTrace,  ///< q = 2, p in (2,2*), 0 < b < (gamma-1)/2
    CriticalTrace,    ///< q = 2_* with b > 0: nonexistence expected, run allowed
    CriticalVolume    ///< p = 2* with a > 0: nonexistence expected, run allowed
};

SolveRegime classify_regime(const ProblemParams& params, double gamma);

struct SolverConfig {
    int path_nodes = 21;
    int max_iters = 2000;
    double grad_tol = 1e-5;
    double cg_tol = 1e-10;
    int cg_max_iter = 50000;
    std::uint64_t seed = 1;
    int reparam_every = 5;
};

struct SolveResult {
    Field solution; ///< nonnegative
    double level = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
    std::vector<double> path_max_history; ///< nonincreasing across iterations
    double ring_radius = 0.0;             ///< detected r0
    double ring_level = 0.0;              ///< detected C0 > 0
    ProblemParams params;
    Weight weight;
    bool converged = false;
};

struct SolverMaxIter : MaxIterError {
    SolveResult best;
    SolverMaxIter(const std::string& msg, SolveResult b) : MaxIterError(msg), best(std::move(b)) {}
};

struct SolverCollapse : CollapseError {
    double last_level = 0.0;
    double ring_level = 0.0;
    SolverCollapse(const std::string& msg, double level, double ring)
        : CollapseError(msg), last_level(level), ring_level(ring) {}
};

/// Discrete mountain pass: a path of path_nodes fields from 0 to a far
/// endpoint with negative energy; each iteration descends the path maximizer
/// with the Riesz gradient and backtracking, projecting to the nonnegative
/// cone; the path is re-parameterized by arc length every few iterations
/// (skipped when resampling would raise the discrete maximum). Terminates
/// when the maximizer's dual residual drops below grad_tol; degenerating
/// below the ring level C0 raises SolverCollapse.
SolveResult mountain_pass_solve(const ProblemParams& params, const Weight& weight,
                                const GridPtr& grid, const SolverConfig& config);

struct RobinResiduals {
    double interior = 0.0; ///< sup |Lap v| on the interior test region
    double boundary = 0.0; ///< sup |-dv/dz + v - b |v|^(q-2} v| on z = 0
};

/// Robin change of variables v = (1+z) u for the gamma = 2 power weight with
/// a = 0: v should be discretely harmonic with the Robin boundary condition.
RobinResiduals robin_transform_check(const Field& field, const ProblemParams& params,
                                     const Weight& weight);

} // namespace hvlab
