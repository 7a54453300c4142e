#pragma once

#include <utility>

#include "hvlab/core_math.hpp"
#include "hvlab/grid.hpp"
#include "hvlab/rational.hpp"

namespace hvlab {

struct PohozaevReport {
    double lhs_main = 0.0;      ///< (N-2)/2 int rho |grad u|^2
    double lhs_weight = 0.0;    ///< 1/2 int rho'(z) z |grad u|^2
    double rhs_volume = 0.0;    ///< N int F(u),  F(t) = a|t|^p/p
    double rhs_boundary = 0.0;  ///< (N-1) int_bd G(u),  G(t) = b|t|^q/q
    double residual = 0.0;      ///< (lhs_main + lhs_weight) - (rhs_volume + rhs_boundary)
    double relative_residual = 0.0;
    double relation_lhs = 0.0; ///< lhs_weight
    double relation_rhs = 0.0; ///< a A int |u|^p + b B int_bd |u|^q
    bool tail_warning = false; ///< outer 10% band carries > 1% of some integral
    double tail_fraction_max = 0.0;
};

/// Quadrature evaluation of the weighted Pohozaev identity. Power weights
/// with gamma = 0 are the classical case (lhs_weight = 0).
PohozaevReport pohozaev_eval(const Field& field, const ProblemParams& params,
                             const Weight& weight);

/// A = N/p - (N-2)/2, B = (N-1)/q - (N-2)/2. A vanishes iff p = 2*, B iff
/// q = 2_*; the rational overload makes that exact.
std::pair<double, double> criticality_coefficients(int N, double p, double q);
std::pair<Rational, Rational> criticality_coefficients(int N, const Rational& p,
                                                       const Rational& q);

struct NonexistenceProbe {
    double relation_residual = 0.0;
    double obstruction_value = 0.0; ///< 1/2 int rho' z |grad u|^2, > 0 for u != 0
    double A = 0.0;
    double B = 0.0;
};

/// Derived relation of the identity; requires (rho_1), so the constant weight
/// is rejected.
NonexistenceProbe nonexistence_probe(const Field& field, const ProblemParams& params,
                                     const Weight& weight);

} // namespace hvlab
