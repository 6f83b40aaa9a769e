#pragma once

// Parallel loop/reduction kernels. Every kernel has a serial path selected at
// runtime (set_parallel(false)) that performs the exact same arithmetic in the
// same order, so results are bit-identical across thread counts. Reductions
// store per-index partials and sum them serially in index order.

#include <cstddef>
#include <vector>

namespace folmod {

bool parallel_enabled();
void set_parallel(bool on);
void set_thread_count(int n);  // 0 = runtime default
int max_threads();

namespace detail {
void run_parallel(std::ptrdiff_t n, void* ctx, void (*fn)(void*, std::ptrdiff_t));
}

template <class F>
void parallel_for(std::ptrdiff_t n, F&& body) {
    if (parallel_enabled() && n > 1) {
        detail::run_parallel(n, &body, [](void* ctx, std::ptrdiff_t i) {
            (*static_cast<F*>(ctx))(i);
        });
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    }
}

// Fixed-order reduction: partial[i] = term(i) computed in parallel, then a
// serial left-to-right sum.
template <class F>
double parallel_sum(std::ptrdiff_t n, F&& term) {
    std::vector<double> partial(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::ptrdiff_t i) { partial[static_cast<std::size_t>(i)] = term(i); });
    double s = 0.0;
    for (double x : partial) s += x;
    return s;
}

}  // namespace folmod
