#include "hvlab/exec.hpp"

namespace hvlab {

namespace {
thread_local bool g_parallel = true;
}

bool parallel_enabled() noexcept { return g_parallel; }
void set_parallel_enabled(bool on) noexcept { g_parallel = on; }

} // namespace hvlab
