#include "pfbe/kernels.hpp"

#include <cstdlib>
#include <string>

namespace pfbe {

int thread_cap_from_env() {
    const char *env = std::getenv("PFBE_THREADS");
    if (!env)
        return 0;
    try {
        const int v = std::stoi(env);
        return v > 0 ? v : 0;
    } catch (const std::exception &) {
        return 0;
    }
}

namespace {

bool better(double v, std::size_t i, const GridArgmin &best) {
    return v < best.value || (v == best.value && i < best.index);
}

GridArgmin scan(const TensorGrid &grid, const std::function<double(const Vec &)> &fn,
                std::size_t begin, std::size_t end) {
    GridArgmin best;
    best.index = end;
    for (std::size_t i = begin; i < end; ++i) {
        const double v = fn(grid.point(i));
        if (better(v, i, best)) {
            best.value = v;
            best.index = i;
        }
    }
    return best;
}

} // namespace

GridArgmin grid_argmin(const TensorGrid &grid, const std::function<double(const Vec &)> &fn,
                       Execution exec) {
    const std::size_t total = grid.size();
    if (exec == Execution::serial)
        return scan(grid, fn, 0, total);

    // Fixed chunking: each chunk is reduced serially, chunks are combined in
    // index order.
    const std::size_t chunk = 4096;
    const std::size_t nchunks = (total + chunk - 1) / chunk;
    std::vector<GridArgmin> partial(nchunks);
    for_each_index(
        nchunks,
        [&](std::size_t c) {
            partial[c] = scan(grid, fn, c * chunk, std::min(total, (c + 1) * chunk));
        },
        Execution::parallel);
    GridArgmin best;
    best.index = total;
    for (const auto &p : partial)
        if (better(p.value, p.index, best))
            best = p;
    return best;
}

GridArgmin grid_min_gamma(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                          const TensorGrid &grid, Execution exec) {
    const Eigen::Index n = problem.n(), p = problem.p();
    check_dim(static_cast<Eigen::Index>(grid.dims()), n + p, "grid_min_gamma grid");
    auto fn = [&](const Vec &pt) {
        return gamma(problem, cfg, pt.head(n), pt.tail(p));
    };
    return grid_argmin(grid, fn, exec);
}

} // namespace pfbe
