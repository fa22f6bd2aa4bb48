#pragma once

#include <cstdint>
#include <vector>

namespace gmcf {

/// Set the number of worker threads used by the grid kernels.
/// 1 (the default) runs everything serially; 0 means "all cores".
void set_threads(int k);
int threads();

/// Parallel loop over slab indices [0, count). Each slab is processed
/// entirely by one worker, so per-slab results are independent of the
/// thread count and of the schedule.
template <class F>
void parallel_slabs(long count, F&& body);

/// Combine per-slab partial sums serially in index order; together with
/// parallel_slabs this gives reductions whose result is bitwise independent
/// of the thread count.
inline double ordered_sum(const std::vector<double>& partials) {
    double s = 0.0;
    for (double p : partials) s += p;
    return s;
}

}  // namespace gmcf

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gmcf {

template <class F>
void parallel_slabs(long count, F&& body) {
#ifdef _OPENMP
    if (threads() != 1) {
#pragma omp parallel for schedule(static) num_threads(threads() > 0 ? threads() : omp_get_max_threads())
        for (long s = 0; s < count; ++s) body(s);
        return;
    }
#endif
    for (long s = 0; s < count; ++s) body(s);
}

}  // namespace gmcf
