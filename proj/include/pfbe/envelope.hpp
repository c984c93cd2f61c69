#pragma once

#include "pfbe/core.hpp"

namespace pfbe {

/// Prox step η and penalty weight α of the envelope objective
///   Γ(x, y) = αΨ_η(x, y) − (α−1) f(x, y) + r1(x) + (α−1) r2(y).
class EnvelopeConfig {
  public:
    /// Throws PreconditionViolation unless η > 0 and α ≥ max{1, 2/(ημ)}.
    EnvelopeConfig(const MinimaxProblem &problem, double eta, double alpha);

    /// η = min{1, 1/(2 L_f)}, α = max{1, 2/(ημ)}.
    static EnvelopeConfig theorem_default(const MinimaxProblem &problem);
    /// Smallest admissible α for the given η.
    static double min_alpha(double eta, double mu);

    double eta() const { return eta_; }
    double alpha() const { return alpha_; }

  private:
    double eta_, alpha_;
};

struct ProxStep {
    Vec T; ///< T_{y,η}(x, y)
    Vec R; ///< (T − y) / η
};

/// Everything the solvers need at one point, built from a single ∇_y f and
/// a single prox call.
struct EnvelopeEval {
    Vec T, R;
    Vec grad_y_f;   ///< ∇_y f(x, y)
    double f = 0;   ///< f(x, y)
    double psi = 0; ///< Ψ_η(x, y)
    double xi = 0;  ///< αΨ − (α−1) f, the smooth part of Γ
    double gamma = 0;
    Vec grad_x;     ///< ∇_x Ξ
    Vec grad_y;     ///< ∇_y Ξ
    bool used_fd_hvp = false;
    bool has_gradient = false;
};

/// T = prox_{η r2 + ind_Y}(y + η ∇_y f(x, y)), R = (T − y)/η.
/// Requires y ∈ Y within 1e-9.
ProxStep prox_step(const MinimaxProblem &problem, const EnvelopeConfig &cfg, const Vec &x,
                   const Vec &y);

double psi(const MinimaxProblem &problem, const EnvelopeConfig &cfg, const Vec &x, const Vec &y);
double gamma(const MinimaxProblem &problem, const EnvelopeConfig &cfg, const Vec &x,
             const Vec &y);

struct GammaGradient {
    Vec grad_x;              ///< ∇_x Ξ; r1 is left to the solver's prox
    Vec grad_y_smooth;       ///< ∇_y Ξ
    double y_nonsmooth_weight; ///< α − 1, the weight multiplying r2(y) in Γ
};

GammaGradient grad_gamma(const MinimaxProblem &problem, const EnvelopeConfig &cfg, const Vec &x,
                         const Vec &y);

/// Bundled evaluation; gradients are skipped when with_gradient is false.
EnvelopeEval evaluate(const MinimaxProblem &problem, const EnvelopeConfig &cfg, const Vec &x,
                      const Vec &y, bool with_gradient = true);

/// prox of (weight·step·r2 + ind_Y) at z; plain projection when weight is 0.
Vec prox_y_weighted(const MinimaxProblem &problem, const Vec &z, double step, double weight);

/// True when some component of T lies within tol of a finite bound of a box Y
/// (or, for other non-trivial Y, when the prox moved the forward point at
/// all). Gradient finite-difference checks skip such points.
bool near_prox_kink(const MinimaxProblem &problem, const EnvelopeConfig &cfg, const Vec &x,
                    const Vec &y, double tol = 1e-6);

} // namespace pfbe
