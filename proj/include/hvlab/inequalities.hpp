#pragma once

#include <string>
#include <vector>

#include "hvlab/core_math.hpp"
#include "hvlab/grid.hpp"

namespace hvlab {

struct InequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;          ///< rhs - lhs
    double relative_slack = 0.0; ///< slack / max(|rhs|, eps_mach)
    double constant_used = 0.0;
    std::vector<std::string> tags;

    static InequalityReport make(double lhs, double rhs, double constant,
                                 std::vector<std::string> tags = {});
};

/// Weighted Hardy inequality with boundary term:
///   C^p int |u|^p (1+z)^(gamma-p) + C^(p-1) int_bd |u|^p
///     <= int (1+z)^gamma |grad u|^p,  C = (gamma-p+1)/p.
/// Requires a PowerOnePlus weight with gamma > p-1 > 0.
InequalityReport hardy_p_check(const Field& field, const Weight& weight, double p);

/// L2 trace form: (gamma-1)/2 int_bd u^2 <= weighted Dirichlet energy.
InequalityReport trace_l2_check(const Field& field, double gamma);

struct TraceChainReport {
    InequalityReport trace_link;  ///< S_num (bd L^2_* norm)^2 <= unweighted energy
    InequalityReport weight_link; ///< unweighted energy <= weighted energy
    InequalityReport interp_link; ///< (bd L^q norm)^2 <= C0 * weighted energy, q < 2_*
    bool has_interp = false;
};

/// Two-link chain through the critical trace inequality, with the calibrated
/// grid constant s_num. For q < 2_* the interpolated constant
/// C0 = (2/(gamma-1))^(1-theta) (1/s_num)^theta is derived and reported.
TraceChainReport trace_lq_chain_check(const Field& field, double gamma, double q, double s_num);

/// k_n = (2*/zeta)^n - 1 for n = 1..n_max; requires 2 <= zeta < 2*.
std::vector<double> moser_ladder(int N, double zeta, int n_max);

struct LadderEntry {
    double exponent = 0.0;
    double norm = 0.0;
};

/// Volume L^((k_n+1) 2*) norms along the ladder. Exponents above 512 are
/// capped; if no rung fits under the cap an ExponentCapError is thrown.
std::vector<LadderEntry> ladder_supnorm_diagnostic(const Field& field, int N, double zeta,
                                                   int n_max);

} // namespace hvlab
