#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hvlab/grid.hpp"

namespace hvlab {

/// Options for the seeded random bump generator: sums of 1..5 Gaussians in
/// (r, z), positive amplitudes, tapered to vanish on the truncation boundary.
struct BumpOptions {
    int min_bumps = 1;
    int max_bumps = 5;
    double amp_lo = 0.2, amp_hi = 1.0;
    double center_box = 0.5;  ///< centers drawn in [0, box*R] x [0, box*H]
    double width_lo = 0.04, width_hi = 0.15; ///< widths as fractions of min(R,H)
};

Field random_bump_field(const GridPtr& grid, std::mt19937_64& rng,
                        const BumpOptions& opts = BumpOptions{});

/// Deterministic suite: field k is generated from seed ^ k.
std::vector<Field> bump_suite(const GridPtr& grid, int count, std::uint64_t seed,
                              const BumpOptions& opts = BumpOptions{});

} // namespace hvlab
