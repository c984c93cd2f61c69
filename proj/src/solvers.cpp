#include "pfbe/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

namespace pfbe {

double StepSchedule::at(long k) const {
    if (power == 0)
        return base;
    return base / std::pow(static_cast<double>(k + 1), power);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_convex_x(const MinimaxProblem &problem, const char *who) {
    if (!problem.X->is_convex())
        throw UnsupportedSet(std::string(who) + ": X must be convex");
}

bool finite_eval(const EnvelopeEval &e) {
    return std::isfinite(e.gamma) && e.grad_x.allFinite() && e.grad_y.allFinite();
}

bool too_large(const Vec &x, const Vec &y, double limit) {
    return !(x.norm() < limit && y.norm() < limit);
}

// Shared bookkeeping: starting point, normalizer and the per-iterate record.
struct Run {
    const MinimaxProblem &problem;
    const EnvelopeConfig &cfg;
    const SolverConfig &scfg;
    SolveResult res;
    double norm0 = 1;

    Run(const MinimaxProblem &pr, const EnvelopeConfig &c, const SolverConfig &s)
        : problem(pr), cfg(c), scfg(s) {}

    EnvelopeEval start(Vec &x, Vec &y, const Vec &x0, const Vec &y0) {
        check_dim(x0.size(), problem.n(), "solver x0");
        check_dim(y0.size(), problem.p(), "solver y0");
        if (!x0.allFinite() || !y0.allFinite())
            throw NonFiniteValue("solver: non-finite starting point");
        x = problem.X->project(x0);
        y = problem.Y->project(y0);
        auto e = evaluate(problem, cfg, x, y);
        if (!finite_eval(e))
            throw NonFiniteValue("solver: non-finite envelope at the starting point");
        res.grad_norm0 = gradient_norm(e);
        norm0 = res.grad_norm0 < 1e-15 ? 1.0 : res.grad_norm0;
        return e;
    }

    // Records the iterate; returns true when the stopping test is met.
    bool record(const Vec &x, const Vec &y, const EnvelopeEval &e) {
        res.used_fd_hvp = res.used_fd_hvp || e.used_fd_hvp;
        res.x = x;
        res.y = y;
        res.fval = e.gamma;
        res.stat_unnormalized = stationarity_residual(problem, cfg, x, y, e);
        res.stat = res.stat_unnormalized / norm0;
        if (scfg.record_trace)
            res.trace.push_back({e.gamma, res.stat, e.R.norm()});
        res.converged = res.stat <= scfg.gtol;
        return res.converged;
    }
};

} // namespace

// SPG ------------------------------------------------------------------------

SolveResult solve_spg(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                      const SolverConfig &scfg, const Vec &x0, const Vec &y0) {
    problem.validate();
    require_convex_x(problem, "solve_spg");
    if (scfg.bb_memory < 1 || scfg.nonmonotone_window < 1)
        throw ConfigError("solve_spg: bb_memory and nonmonotone_window must be positive");
    const auto t_start = Clock::now();
    const double weight_y = cfg.alpha() - 1;

    Run run(problem, cfg, scfg);
    Vec x, y;
    EnvelopeEval e = run.start(x, y, x0, y0);

    std::deque<double> history{e.gamma};
    std::deque<double> bb2_hist;
    double tau = 0.5;
    // First step from the unit-step residual, as in classic SPG.
    double t;
    {
        const Vec dx = problem.prox_x_step(x - e.grad_x, 1.0) - x;
        const Vec dy = prox_y_weighted(problem, y - e.grad_y, 1.0, weight_y) - y;
        const double dinf = std::max(dx.lpNorm<Eigen::Infinity>(), dy.lpNorm<Eigen::Infinity>());
        t = dinf > 0 ? 1.0 / dinf : 1.0;
        t = std::clamp(t, scfg.step_min, scfg.step_max);
    }

    for (long k = 0;; ++k) {
        run.res.iter = k;
        if (run.record(x, y, e) || k >= scfg.max_iter)
            break;

        const double ref = *std::max_element(history.begin(), history.end());
        bool accepted = false;
        Vec xn, yn;
        EnvelopeEval en;
        for (int j = 0; j <= scfg.max_backtracks; ++j) {
            xn = problem.prox_x_step(x - t * e.grad_x, t);
            yn = prox_y_weighted(problem, y - t * e.grad_y, t, weight_y);
            const double d2 = (xn - x).squaredNorm() + (yn - y).squaredNorm();
            en = evaluate(problem, cfg, xn, yn);
            if (finite_eval(en) && en.gamma <= ref - scfg.sufficient_decrease / (2 * t) * d2) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            run.res.step_failure = true;
            break;
        }

        const Vec sx = xn - x, sy = yn - y;
        const Vec gx = en.grad_x - e.grad_x, gy = en.grad_y - e.grad_y;
        const double sts = sx.squaredNorm() + sy.squaredNorm();
        const double sty = sx.dot(gx) + sy.dot(gy);
        const double yty = gx.squaredNorm() + gy.squaredNorm();
        x = std::move(xn);
        y = std::move(yn);
        e = std::move(en);

        if (too_large(x, y, scfg.divergence_limit)) {
            run.res.iter = k + 1;
            run.record(x, y, e);
            run.res.diverged = true;
            break;
        }

        if (sty > 0) {
            const double bb1 = sts / sty, bb2 = sty / yty;
            bb2_hist.push_back(bb2);
            if (static_cast<int>(bb2_hist.size()) > scfg.bb_memory)
                bb2_hist.pop_front();
            // Adaptive ABBmin: short BB2 steps when the two BB estimates
            // disagree, long BB1 steps otherwise.
            if (bb2 / bb1 < tau) {
                t = *std::min_element(bb2_hist.begin(), bb2_hist.end());
                tau *= 0.9;
            } else {
                t = bb1;
                tau *= 1.1;
            }
        } else {
            // Negative curvature along the step: expand and let the line
            // search cut back.
            t *= 10;
        }
        t = std::clamp(t, scfg.step_min, scfg.step_max);

        history.push_back(e.gamma);
        if (static_cast<int>(history.size()) > scfg.nonmonotone_window)
            history.pop_front();
    }

    if (run.res.step_failure || run.res.diverged)
        run.res.converged = false;
    run.res.wall_time = seconds_since(t_start);
    return std::move(run.res);
}

// SubGDA ---------------------------------------------------------------------

SubgdaSteps resolve_subgda_steps(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                                 const SolverConfig &scfg) {
    const double eta = cfg.eta();
    const double L = problem.lipschitz();
    SubgdaSteps s;
    s.theta_required = cfg.alpha() * eta * L * L / problem.mu();
    const double theta = scfg.theta > 0 ? scfg.theta : s.theta_required;

    if (scfg.step_y)
        s.y = *scfg.step_y;
    else
        s.y = {eta / 2, scfg.step_x ? scfg.step_x->power : 0.0};
    if (scfg.step_x)
        s.x = *scfg.step_x;
    else
        s.x = {s.y.base / theta, s.y.power};

    for (const auto *sch : {&s.x, &s.y}) {
        if (!(sch->base > 0) || !(sch->power >= 0 && sch->power <= 1))
            throw PreconditionViolation(
                "solve_subgda: steps need base > 0 and decay power in [0, 1]");
    }
    // Steps are nonincreasing, so the first y step is the supremum.
    if (s.y.base > eta * (1 + 1e-15))
        throw PreconditionViolation("solve_subgda: y step must not exceed eta");

    if (scfg.theory_mode) {
        const double tol = 1 - 1e-12;
        if (s.x.power != s.y.power)
            throw PreconditionViolation("solve_subgda: theory mode needs equal decay powers");
        if (theta < s.theta_required * tol || s.y.base / s.x.base < s.theta_required * tol)
            throw PreconditionViolation(
                "solve_subgda: theory mode needs eta_y/eta_x >= alpha*eta*L^2/mu");
    }
    return s;
}

SolveResult solve_subgda(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                         const SolverConfig &scfg, const Vec &x0, const Vec &y0) {
    problem.validate();
    require_convex_x(problem, "solve_subgda");
    const auto steps = resolve_subgda_steps(problem, cfg, scfg);
    const auto t_start = Clock::now();

    Run run(problem, cfg, scfg);
    Vec x, y;
    EnvelopeEval e = run.start(x, y, x0, y0);

    for (long k = 0;; ++k) {
        run.res.iter = k;
        if (run.record(x, y, e) || k >= scfg.max_iter)
            break;
        const double ex = steps.x.at(k), ey = steps.y.at(k);
        Vec xn = problem.prox_x_step(x - ex * problem.f->grad_x(x, y), ex);
        const auto ps = prox_step(problem, cfg, xn, y);
        y = y + ey * ps.R;
        x = std::move(xn);
        e = evaluate(problem, cfg, x, y);
        if (!finite_eval(e) || too_large(x, y, scfg.divergence_limit)) {
            run.res.iter = k + 1;
            run.res.x = x;
            run.res.y = y;
            run.res.fval = e.gamma;
            run.res.stat = run.res.stat_unnormalized = std::numeric_limits<double>::infinity();
            run.res.diverged = true;
            run.res.converged = false;
            break;
        }
    }
    run.res.wall_time = seconds_since(t_start);
    return std::move(run.res);
}

// GDA baseline ---------------------------------------------------------------

SolveResult solve_gda_baseline(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                               const SolverConfig &scfg, const Vec &x0, const Vec &y0) {
    problem.validate();
    require_convex_x(problem, "solve_gda_baseline");
    if (!scfg.step_x || !scfg.step_y)
        throw ConfigError("solve_gda_baseline: step_x and step_y are required");
    const auto t_start = Clock::now();

    Run run(problem, cfg, scfg);
    Vec x, y;
    EnvelopeEval e = run.start(x, y, x0, y0);

    for (long k = 0;; ++k) {
        run.res.iter = k;
        if (run.record(x, y, e) || k >= scfg.max_iter)
            break;
        const double sx = scfg.step_x->at(k), sy = scfg.step_y->at(k);
        Vec xn = problem.prox_x_step(x - sx * problem.f->grad_x(x, y), sx);
        Vec yn = problem.prox_y_step(y + sy * e.grad_y_f, sy);
        x = std::move(xn);
        y = std::move(yn);
        if (!x.allFinite() || !y.allFinite() || too_large(x, y, scfg.divergence_limit)) {
            run.res.iter = k + 1;
            run.res.stat = run.res.stat_unnormalized = std::numeric_limits<double>::infinity();
            run.res.diverged = true;
            run.res.converged = false;
            break;
        }
        e = evaluate(problem, cfg, x, y);
    }
    run.res.wall_time = seconds_since(t_start);
    return std::move(run.res);
}

std::vector<std::pair<int, int>> default_step_grid() {
    std::vector<std::pair<int, int>> grid;
    for (int a2 = 1; a2 <= 4; ++a2)
        for (int a1 : {1, 3, 5, 7, 9})
            grid.emplace_back(a1, a2);
    return grid;
}

double grid_step(const std::pair<int, int> &a) { return a.first * std::pow(10.0, -a.second); }

GdaSelection select_gda_steps(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                              const SolverConfig &scfg, const Vec &x0, const Vec &y0,
                              const std::vector<std::pair<int, int>> &grid, Execution exec) {
    if (grid.empty())
        throw ConfigError("select_gda_steps: empty step grid");
    const std::size_t g = grid.size();
    const std::size_t total = g * g;
    std::vector<SolveResult> results(total);
    for_each_index(
        total,
        [&](std::size_t i) {
            SolverConfig local = scfg;
            local.step_x = StepSchedule{grid_step(grid[i / g]), 0};
            local.step_y = StepSchedule{grid_step(grid[i % g]), 0};
            results[i] = solve_gda_baseline(problem, cfg, local, x0, y0);
        },
        exec, thread_cap_from_env());

    // Strict comparison keeps the smallest index on ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < total; ++i)
        if (results[i].stat < results[best].stat)
            best = i;
    GdaSelection sel;
    sel.index = best;
    sel.step_x = grid_step(grid[best / g]);
    sel.step_y = grid_step(grid[best % g]);
    sel.result = std::move(results[best]);
    return sel;
}

bool gamma_descent_check(const std::vector<TracePoint> &trace, double slack) {
    if (trace.empty())
        return true;
    const double tol = slack * (1 + std::abs(trace.front().gamma));
    for (std::size_t k = 1; k < trace.size(); ++k)
        if (!(trace[k].gamma <= trace[k - 1].gamma + tol))
            return false;
    return true;
}

} // namespace pfbe
