#pragma once

#include "pfbe/diagnostics.hpp"
#include "pfbe/kernels.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace pfbe {

/// η_k = base / (k + 1)^power; power 0 gives a constant step.
struct StepSchedule {
    double base = 0;
    double power = 0;

    double at(long k) const;
};

struct SolverConfig {
    long max_iter = 10000;
    double gtol = 1e-7;

    // SubGDA / GDA step sizes. SubGDA fills missing schedules from the
    // envelope: η_y = η/2 and η_x = η_y/θ.
    std::optional<StepSchedule> step_x, step_y;
    double theta = 0;         ///< η_y/η_x limit; 0 derives α η L²/μ
    bool theory_mode = false; ///< enforce the step-size assumptions strictly

    // SPG.
    int bb_memory = 7; ///< BB2 steps remembered by the adaptive ABBmin rule
    int nonmonotone_window = 10;
    double sufficient_decrease = 1e-4;
    double step_min = 1e-10, step_max = 1e10;
    int max_backtracks = 50;

    /// Iterates whose norm exceeds this are treated as divergence.
    double divergence_limit = 1e12;
    bool record_trace = false;
};

struct TracePoint {
    double gamma = 0;
    double stat = 0;
    double r_norm = 0;
};

struct SolveResult {
    Vec x, y;
    double fval = 0; ///< Γ at the returned point
    long iter = 0;
    double stat = 0; ///< normalized Γ residual
    double stat_unnormalized = 0;
    double grad_norm0 = 0;
    double feas = 0; ///< filled by callers that know the constraint
    double wall_time = 0;
    bool converged = false;
    bool step_failure = false; ///< SPG line search exhausted its backtracks
    bool diverged = false;
    bool used_fd_hvp = false;
    std::vector<TracePoint> trace;
};

/// Nonmonotone proximal spectral projected gradient on Γ over X × Y with
/// adaptive Barzilai-Borwein steps.
SolveResult solve_spg(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                      const SolverConfig &scfg, const Vec &x0, const Vec &y0);

/// Subgradient descent-ascent:
///   x⁺ = prox_{η_x r1 + X}(x − η_x ∇_x f(x, y)),  y⁺ = y + η_y R(x⁺, y).
SolveResult solve_subgda(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                         const SolverConfig &scfg, const Vec &x0, const Vec &y0);

/// Simultaneous proximal gradient descent-ascent on f + r1 − r2 with
/// constant steps step_x, step_y (both required). Stationarity is measured on
/// Γ so results compare with the other solvers.
SolveResult solve_gda_baseline(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                               const SolverConfig &scfg, const Vec &x0, const Vec &y0);

/// Resolved SubGDA steps after defaults and checks.
struct SubgdaSteps {
    StepSchedule x, y;
    double theta_required = 0;
};
SubgdaSteps resolve_subgda_steps(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                                 const SolverConfig &scfg);

/// {a1·10^-a2 : a1 ∈ {1,3,5,7,9}, a2 ∈ {1,2,3,4}} in (a2, a1) order.
std::vector<std::pair<int, int>> default_step_grid();
double grid_step(const std::pair<int, int> &a);

struct GdaSelection {
    double step_x = 0, step_y = 0;
    std::size_t index = 0; ///< flat index into the (x, y) step pairs
    SolveResult result;
};

/// Run GDA for every (step_x, step_y) pair from the grid and keep the run
/// with the smallest final stat; ties go to the smaller index. Diverged runs
/// carry an infinite stat and never win unless every run diverged.
GdaSelection select_gda_steps(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                              const SolverConfig &scfg, const Vec &x0, const Vec &y0,
                              const std::vector<std::pair<int, int>> &grid,
                              Execution exec = Execution::parallel);

/// Γ nonincreasing along the trace up to a per-step slack of
/// slack·(1 + |Γ0|).
bool gamma_descent_check(const std::vector<TracePoint> &trace, double slack = 1e-8);

} // namespace pfbe
