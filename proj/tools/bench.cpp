// Serial-vs-OpenMP kernel benchmark.
#include <chrono>
#include <cstdio>

#include "hvlab/exec.hpp"
#include "hvlab/grid.hpp"
#include "hvlab/linsolve.hpp"

using namespace hvlab;
using Clock = std::chrono::steady_clock;

namespace {

template <class F>
double time_ms(F&& f, int reps) {
    f(); // warm up
    const auto t0 = Clock::now();
    for (int k = 0; k < reps; ++k) f();
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count() / reps;
}

} // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 512;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 20;
    auto grid = make_grid(3, 20.0, 20.0, n, n);
    Weight w = Weight::power(3.0);
    Field f = interpolate_analytic(
        grid, [](double r, double z) { return std::exp(-0.1 * (r + z)) * std::sin(r) + 0.3 * z; },
        true);
    WeightedStiffness K(grid, w);
    Field out(grid);
    Field b = interpolate_analytic(
        grid, [](double r, double z) { return std::exp(-r - z); }, true);
    apply_truncation_mask(b);

    struct Row {
        const char* name;
        double serial_ms, parallel_ms;
    };
    Row rows[] = {
        {"volume_integral", 0, 0}, {"dirichlet_energy", 0, 0}, {"gradient", 0, 0},
        {"stiffness_apply", 0, 0}, {"pcg_50_iters", 0, 0},
    };

    for (int lane = 0; lane < 2; ++lane) {
        ExecGuard guard(lane == 1);
        auto slot = [&](int i) -> double& { return lane == 0 ? rows[i].serial_ms : rows[i].parallel_ms; };
        slot(0) = time_ms([&] { volume_integral(f); }, reps);
        slot(1) = time_ms([&] { weighted_dirichlet_energy(f, w); }, reps);
        slot(2) = time_ms([&] { gradient(f); }, reps);
        slot(3) = time_ms([&] { K.apply(f, out); }, reps);
        slot(4) = time_ms(
            [&] {
                std::vector<double> x(grid->num_nodes(), 0.0);
                pcg_solve(K, b.values(), x, 1e-30, 50);
            },
            std::max(1, reps / 10));
    }

    std::printf("grid %dx%d, %d reps\n", n, n, reps);
    std::printf("%-18s %12s %12s %8s\n", "kernel", "serial ms", "openmp ms", "speedup");
    for (const auto& r : rows)
        std::printf("%-18s %12.3f %12.3f %7.2fx\n", r.name, r.serial_ms, r.parallel_ms,
                    r.serial_ms / r.parallel_ms);
    return 0;
}
