#include "folmod/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace folmod {

namespace {
bool g_parallel = true;
}

bool parallel_enabled() { return g_parallel; }
void set_parallel(bool on) { g_parallel = on; }

void set_thread_count(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace detail {
void run_parallel(std::ptrdiff_t n, void* ctx, void (*fn)(void*, std::ptrdiff_t)) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(ctx, i);
#else
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(ctx, i);
#endif
}
}  // namespace detail

}  // namespace folmod
