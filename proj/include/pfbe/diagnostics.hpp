#pragma once

#include "pfbe/envelope.hpp"
#include "pfbe/lagrangian.hpp"

#include <vector>

namespace pfbe {

/// Unit-step prox-gradient residual of Γ at (x, y):
///   ‖prox_{r1+X}(x − ∇_xΞ) − x‖ ⊕ ‖prox_{(α−1)r2+Y}(y − ∇_yΞ) − y‖
/// (Euclidean norm of the stacked displacement).
double stationarity_residual(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                             const Vec &x, const Vec &y, const EnvelopeEval &eval);
double stationarity_residual(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                             const Vec &x, const Vec &y);

/// Norm of the stacked smooth gradient ∇Ξ, the normalizer for stationarity.
double gradient_norm(const EnvelopeEval &eval);

/// Residual at (x, y) divided by ‖∇Ξ(x0, y0)‖. When that norm is below
/// 1e-15 the residual is returned unnormalized and `degenerate` is set.
double stationarity_gamma(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                          const Vec &x, const Vec &y, const Vec &x0, const Vec &y0,
                          bool *degenerate = nullptr);

struct MmResidual {
    double eps_x = 0, eps_y = 0;
};

/// Unit-step prox residuals of the minimax first-order conditions at (x, y):
///   ε_x = ‖prox_{r1+X}(x − ∇_x f) − x‖,  ε_y = ‖prox_{r2+Y}(y + ∇_y f) − y‖.
MmResidual mm_residual(const MinimaxProblem &problem, const Vec &x, const Vec &y);

/// mm_residual evaluated at (x, T_{y,η}(x, y)).
MmResidual eps_minimax_mm(const MinimaxProblem &problem, const EnvelopeConfig &cfg,
                          const Vec &x, const Vec &y);

/// 1 + 2 L_f/μ + η L_f.
double eps_transfer_constant(const MinimaxProblem &problem, const EnvelopeConfig &cfg);

/// ‖c(x, y) − Π_K(c(x, y))‖.
double feasibility_mcc(const CoupledProblem &problem, const Vec &x, const Vec &y);

/// |⟨λ, c(x, y)⟩|.
double complementarity_mcc(const CoupledProblem &problem, const Vec &x, const Vec &lambda,
                           const Vec &y);

struct Certificate {
    double stat_gamma = 0;     ///< normalized Γ residual
    double stat_unnormalized = 0;
    double stat_mm_x = 0;      ///< minimax residuals at (x, T)
    double stat_mm_y = 0;
    double feas = 0;
    double comp = 0;
    double transfer_bound = 0; ///< (1 + 2L/μ + ηL)·stat_unnormalized·1.1
    bool bound_ok = false;
};

/// Full certificate for a lifted point z = (x, λ), y.
Certificate certify(const LiftedProblem &lifted, const EnvelopeConfig &cfg, const Vec &z,
                    const Vec &y, double grad_norm0);

// ---------------------------------------------------------------------------
// Brute-force value function
// ---------------------------------------------------------------------------

/// Tensor grid: one axis of sample values per coordinate.
struct TensorGrid {
    std::vector<std::vector<double>> axes;

    std::size_t dims() const { return axes.size(); }
    std::size_t size() const;
    Vec point(std::size_t flat) const;
    std::vector<std::size_t> unflatten(std::size_t flat) const;
    std::size_t flatten(const std::vector<std::size_t> &idx) const;
};

/// count points evenly spaced on [lo, hi], endpoints included.
std::vector<double> uniform_axis(double lo, double hi, std::size_t count);

struct ValueRow {
    Vec x;
    double phi = 0;       ///< grid max of g(x, ·) + r1(x) over feasible y
    Vec y_best;
    bool feasible = false; ///< false: empty feasible slice
    bool on_boundary = false;
    /// Largest value jump from y_best to an adjacent grid point: the value
    /// resolution of the inner search.
    double resolution = 0;
};

/// Φ(x) = max_{y ∈ Y, c(x,y) ∈ K} g(x, y) + r1(x) by exhaustive search over a
/// tensor y-grid with at most two axes. Rows follow x_grid order.
/// `parallel` selects the OpenMP kernel; results are identical either way.
std::vector<ValueRow> brute_force_value_function(const CoupledProblem &problem,
                                                 const std::vector<Vec> &x_grid,
                                                 const TensorGrid &y_grid, bool parallel = true,
                                                 double feas_tol = 1e-12);

} // namespace pfbe
