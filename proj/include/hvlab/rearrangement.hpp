#pragma once

#include <vector>

#include "hvlab/core_math.hpp"
#include "hvlab/grid.hpp"
#include "hvlab/inequalities.hpp"

namespace hvlab {

struct RearrangedField {
    Field field;
    std::vector<unsigned char> slice_monotone; ///< one flag per z-row
    bool abs_applied = false; ///< input had negative values, |u| was rearranged
};

/// Slice-wise decreasing rearrangement in r. Per z-row the (value, cell
/// measure) pairs are sorted by descending value (stable, ties keep the
/// original radial order) and poured back into the cells in increasing-r
/// order; a cell straddling two runs of the sorted stream receives the
/// measure-weighted average. This preserves the weighted distribution up to
/// one cell of granularity and is exactly idempotent.
RearrangedField schwarz_rearrange(const Field& field);

/// Max over slices of the relative L^s mismatch between u and u*, compared
/// against the one-cell-reshuffle bound 2 h_r / R.
InequalityReport equimeasurability_check(const Field& field, const RearrangedField& rearranged,
                                         double s);

/// lhs = int |u*-v*|^s dmu, rhs = int |u-v|^s dmu.
InequalityReport contraction_check(const Field& u, const Field& v, double s);

/// lhs = weighted energy of u*, rhs = weighted energy of u (Polya-Szego at
/// grid level; the sign holds up to an O(h) defect on smooth fields).
InequalityReport energy_comparison(const Field& field, const Weight& weight);

/// sup over nodes with r >= R/4 of |u*| r^((N-1)/2) / ||u*||; gamma >= 2.
double radial_decay_check(const RearrangedField& rearranged, const Weight& weight);

} // namespace hvlab
