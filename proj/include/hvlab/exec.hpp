#pragma once

namespace hvlab {

/// Runtime switch between the OpenMP kernels and the serial reference path.
/// The two paths produce bit-identical results (fixed summation order); the
/// switch exists for the benchmark, for tests that pin one lane, and so that
/// sweep workers can run cells serially without nesting parallel regions.
/// The flag is thread-local: each sweep worker controls its own lane.
bool parallel_enabled() noexcept;
void set_parallel_enabled(bool on) noexcept;

/// RAII guard: force a lane for the current scope.
class ExecGuard {
  public:
    explicit ExecGuard(bool parallel) : prev_(parallel_enabled()) {
        set_parallel_enabled(parallel);
    }
    ~ExecGuard() { set_parallel_enabled(prev_); }
    ExecGuard(const ExecGuard&) = delete;
    ExecGuard& operator=(const ExecGuard&) = delete;

  private:
    bool prev_;
};

} // namespace hvlab
