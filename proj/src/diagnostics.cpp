#include "pfbe/diagnostics.hpp"

#include "pfbe/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace pfbe {

double stationarity_residual(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                             const Vec &x, const Vec &y, const EnvelopeEval &eval) {
    if (!eval.has_gradient)
        throw PreconditionViolation("stationarity_residual: evaluation lacks gradients");
    const double rx = (problem.prox_x_step(x - eval.grad_x, 1.0) - x).squaredNorm();
    const double ry =
        (prox_y_weighted(problem, y - eval.grad_y, 1.0, cfg.alpha() - 1) - y).squaredNorm();
    return std::sqrt(rx + ry);
}

double stationarity_residual(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                             const Vec &x, const Vec &y) {
    return stationarity_residual(problem, cfg, x, y, evaluate(problem, cfg, x, y));
}

double gradient_norm(const EnvelopeEval &eval) {
    return std::sqrt(eval.grad_x.squaredNorm() + eval.grad_y.squaredNorm());
}

double stationarity_gamma(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                          const Vec &x, const Vec &y, const Vec &x0, const Vec &y0,
                          bool *degenerate) {
    const double norm0 = gradient_norm(evaluate(problem, cfg, x0, y0));
    const double res = stationarity_residual(problem, cfg, x, y);
    if (degenerate)
        *degenerate = norm0 < 1e-15;
    return norm0 < 1e-15 ? res : res / norm0;
}

MmResidual mm_residual(const MinimaxProblem &problem, const Vec &x, const Vec &y) {
    MmResidual r;
    r.eps_x = (problem.prox_x_step(x - problem.f->grad_x(x, y), 1.0) - x).norm();
    r.eps_y = (problem.prox_y_step(y + problem.f->grad_y(x, y), 1.0) - y).norm();
    return r;
}

MmResidual eps_minimax_mm(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                          const Vec &x, const Vec &y) {
    return mm_residual(problem, x, prox_step(problem, cfg, x, y).T);
}

double eps_transfer_constant(const MinimaxProblem &problem, const EnvelopeConfig &cfg) {
    const double L = problem.lipschitz();
    return 1.0 + 2.0 * L / problem.mu() + cfg.eta() * L;
}

double feasibility_mcc(const CoupledProblem &problem, const Vec &x, const Vec &y) {
    const Vec cv = problem.c->value(x, y);
    return (cv - problem.K->project(cv)).norm();
}

double complementarity_mcc(const CoupledProblem &problem, const Vec &x, const Vec &lambda,
                           const Vec &y) {
    return std::abs(lambda.dot(problem.c->value(x, y)));
}

Certificate certify(const LiftedProblem &lifted, const EnvelopeConfig &cfg, const Vec &z,
                    const Vec &y, double grad_norm0) {
    Certificate cert;
    const auto eval = evaluate(lifted.mm, cfg, z, y);
    cert.stat_unnormalized = stationarity_residual(lifted.mm, cfg, z, y, eval);
    cert.stat_gamma =
        grad_norm0 < 1e-15 ? cert.stat_unnormalized : cert.stat_unnormalized / grad_norm0;
    const auto mm = mm_residual(lifted.mm, z, eval.T);
    cert.stat_mm_x = mm.eps_x;
    cert.stat_mm_y = mm.eps_y;
    const Vec x = lifted.x_part(z);
    const Vec lambda = lifted.lambda_part(z);
    cert.feas = feasibility_mcc(lifted.base, x, y);
    cert.comp = complementarity_mcc(lifted.base, x, lambda, y);
    cert.transfer_bound = eps_transfer_constant(lifted.mm, cfg) * cert.stat_unnormalized * 1.1;
    cert.bound_ok = cert.stat_mm_x <= cert.transfer_bound && cert.stat_mm_y <= cert.transfer_bound;
    return cert;
}

// Tensor grid ---------------------------------------------------------------

std::size_t TensorGrid::size() const {
    if (axes.empty())
        return 0;
    std::size_t total = 1;
    for (const auto &axis : axes)
        total *= axis.size();
    return total;
}

std::vector<std::size_t> TensorGrid::unflatten(std::size_t flat) const {
    // Last axis varies fastest.
    std::vector<std::size_t> idx(axes.size());
    for (std::size_t d = axes.size(); d-- > 0;) {
        idx[d] = flat % axes[d].size();
        flat /= axes[d].size();
    }
    return idx;
}

std::size_t TensorGrid::flatten(const std::vector<std::size_t> &idx) const {
    std::size_t flat = 0;
    for (std::size_t d = 0; d < axes.size(); ++d)
        flat = flat * axes[d].size() + idx[d];
    return flat;
}

Vec TensorGrid::point(std::size_t flat) const {
    Vec pt(static_cast<Eigen::Index>(axes.size()));
    for (std::size_t d = axes.size(); d-- > 0;) {
        pt[static_cast<Eigen::Index>(d)] = axes[d][flat % axes[d].size()];
        flat /= axes[d].size();
    }
    return pt;
}

std::vector<double> uniform_axis(double lo, double hi, std::size_t count) {
    if (count == 0)
        return {};
    if (count == 1)
        return {lo};
    std::vector<double> axis(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        axis[i] = lo + step * static_cast<double>(i);
    axis.back() = hi;
    return axis;
}

// Brute force ---------------------------------------------------------------

namespace {

ValueRow value_row(const CoupledProblem &problem, const Vec &x, const TensorGrid &y_grid,
                   double feas_tol) {
    ValueRow row;
    row.x = x;
    row.phi = -std::numeric_limits<double>::infinity();
    const double r1 = problem.r1->value(x);
    const std::size_t total = y_grid.size();
    std::size_t best = total;
    for (std::size_t i = 0; i < total; ++i) {
        const Vec y = y_grid.point(i);
        if (!problem.Y->contains(y, feas_tol))
            continue;
        const Vec cv = problem.c->value(x, y);
        if (!problem.K->contains(cv, feas_tol))
            continue;
        const double v = problem.g->value(x, y) + r1;
        if (v > row.phi) {
            row.phi = v;
            best = i;
        }
    }
    if (best == total)
        return row;

    row.feasible = true;
    row.y_best = y_grid.point(best);
    const auto idx = y_grid.unflatten(best);
    for (std::size_t d = 0; d < y_grid.dims(); ++d) {
        const std::size_t len = y_grid.axes[d].size();
        if (idx[d] == 0 || idx[d] + 1 == len)
            row.on_boundary = true;
        for (int dir : {-1, 1}) {
            if ((dir < 0 && idx[d] == 0) || (dir > 0 && idx[d] + 1 == len))
                continue;
            auto nb = idx;
            nb[d] = static_cast<std::size_t>(static_cast<long long>(idx[d]) + dir);
            const double v = problem.g->value(x, y_grid.point(y_grid.flatten(nb))) + r1;
            row.resolution = std::max(row.resolution, std::abs(v - row.phi));
        }
    }
    return row;
}

} // namespace

std::vector<ValueRow> brute_force_value_function(const CoupledProblem &problem,
                                                 const std::vector<Vec> &x_grid,
                                                 const TensorGrid &y_grid, bool parallel,
                                                 double feas_tol) {
    if (y_grid.dims() == 0 || y_grid.dims() > 2)
        throw PreconditionViolation("brute_force_value_function: y grid must have 1 or 2 axes");
    check_dim(static_cast<Eigen::Index>(y_grid.dims()), problem.p(), "brute force y grid");
    std::vector<ValueRow> rows(x_grid.size());
    for_each_index(
        x_grid.size(), [&](std::size_t i) { rows[i] = value_row(problem, x_grid[i], y_grid, feas_tol); },
        parallel ? Execution::parallel : Execution::serial, thread_cap_from_env());
    return rows;
}

} // namespace pfbe
