#pragma once

// Data-parallel kernels. Every kernel has an OpenMP path and a serial
// reference path that produce bit-identical results; the serial path is what
// the tests compare against.

#include "pfbe/diagnostics.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pfbe {

enum class Execution { serial, parallel };

/// Thread cap from PFBE_THREADS (0 when unset or invalid: runtime default).
int thread_cap_from_env();

/// Run fn(i) for i in [0, count). Each index is independent; results must be
/// written to index-addressed storage so ordering never depends on threads.
template <typename Fn>
void for_each_index(std::size_t count, Fn &&fn, Execution exec, int max_threads = 0) {
    if (exec == Execution::serial || count < 2) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
#ifdef _OPENMP
    const int threads = max_threads > 0 ? max_threads : omp_get_max_threads();
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long long i = 0; i < n; ++i)
        fn(static_cast<std::size_t>(i));
#else
    (void)max_threads;
    for (std::size_t i = 0; i < count; ++i)
        fn(i);
#endif
}

struct GridArgmin {
    double value = std::numeric_limits<double>::infinity();
    std::size_t index = 0;
};

/// Minimum of fn over every point of the grid; ties go to the smallest flat
/// index, so the parallel reduction matches the serial scan exactly.
GridArgmin grid_argmin(const TensorGrid &grid, const std::function<double(const Vec &)> &fn,
                       Execution exec);

/// Γ minimized over a tensor grid of (x, y) for a problem with n + p = dims.
GridArgmin grid_min_gamma(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                          const TensorGrid &grid, Execution exec);

} // namespace pfbe
