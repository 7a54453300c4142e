#include "hvlab/bumps.hpp"

#include <cmath>

namespace hvlab {

Field random_bump_field(const GridPtr& grid, std::mt19937_64& rng, const BumpOptions& opts) {
    std::uniform_int_distribution<int> nb(opts.min_bumps, opts.max_bumps);
    std::uniform_real_distribution<double> uamp(opts.amp_lo, opts.amp_hi);
    std::uniform_real_distribution<double> ur(0.0, opts.center_box * grid->R);
    std::uniform_real_distribution<double> uz(0.0, opts.center_box * grid->H);
    std::uniform_real_distribution<double> uw(opts.width_lo, opts.width_hi);

    struct Bump {
        double a, r0, z0, w2;
    };
    std::vector<Bump> bumps;
    const int n = nb(rng);
    const double scale = std::min(grid->R, grid->H);
    for (int k = 0; k < n; ++k) {
        Bump b;
        b.a = uamp(rng);
        b.r0 = ur(rng);
        b.z0 = uz(rng);
        const double w = uw(rng) * scale;
        b.w2 = w * w;
        bumps.push_back(b);
    }
    return interpolate_analytic(
        grid,
        [&](double r, double z) {
            double v = 0.0;
            for (const auto& b : bumps) {
                const double d2 = (r - b.r0) * (r - b.r0) + (z - b.z0) * (z - b.z0);
                v += b.a * std::exp(-d2 / b.w2);
            }
            return v;
        },
        true);
}

std::vector<Field> bump_suite(const GridPtr& grid, int count, std::uint64_t seed,
                              const BumpOptions& opts) {
    std::vector<Field> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * std::uint64_t(k + 1)));
        out.push_back(random_bump_field(grid, rng, opts));
    }
    return out;
}

} // namespace hvlab
