#pragma once

#include "pfbe/core.hpp"

#include <memory>

namespace pfbe {

/// Smooth part of the Lagrangian L_P(x, λ, y) = g(x, y) − ⟨λ, c(x, y)⟩,
/// viewed as a function of the merged minimization variable z = (x, λ).
class LagrangianOracle final : public FunctionOracle {
  public:
    LagrangianOracle(std::shared_ptr<const FunctionOracle> g,
                     std::shared_ptr<const ConstraintOracle> c, double lipschitz);

    Eigen::Index dim_x() const override { return n_ + m_; }
    Eigen::Index dim_y() const override { return g_->dim_y(); }

    double value(const Vec &z, const Vec &y) const override;
    Vec grad_x(const Vec &z, const Vec &y) const override;
    Vec grad_y(const Vec &z, const Vec &y) const override;
    bool provides_hvp() const override;
    Vec hvp_xy(const Vec &z, const Vec &y, const Vec &v) const override;
    Vec hvp_yy(const Vec &z, const Vec &y, const Vec &v) const override;
    double lipschitz_grad() const override { return lipschitz_; }
    double strong_concavity() const override { return g_->strong_concavity(); }

  private:
    std::shared_ptr<const FunctionOracle> g_;
    std::shared_ptr<const ConstraintOracle> c_;
    Eigen::Index n_, m_;
    double lipschitz_;
};

/// The Lagrangian lift of a coupled problem: an uncoupled minimax problem in
/// (x, λ) ∈ X × K° against y ∈ Y.
struct LiftedProblem {
    CoupledProblem base;
    MinimaxProblem mm;
    std::shared_ptr<const ProjectableCone> K_polar;

    Eigen::Index n() const { return base.n(); }
    Eigen::Index m() const { return base.m(); }
    Eigen::Index p() const { return base.p(); }

    Vec x_part(const Vec &z) const { return z.head(n()); }
    Vec lambda_part(const Vec &z) const { return z.tail(m()); }
    Vec join(const Vec &x, const Vec &lambda) const;
};

/// Build the lifted problem. Throws IncompleteOracle when the constraint
/// oracle cannot supply the Jacobian products. `r2_lift` defaults to zero.
LiftedProblem lift(const CoupledProblem &problem,
                   std::shared_ptr<const ProxRegularizer> r2_lift = nullptr,
                   FusedProx prox_y = {});

struct MolResidual {
    double r_x = 0, r_y = 0, r_lambda = 0;
    double max() const;
};

/// Prox-gradient residuals of the three first-order conditions of the lifted
/// problem at (x, λ, y), all with unit step:
///   r_x = ‖prox_{r1+X}(x − (∇_x g − ∇_x c λ)) − x‖
///   r_y = ‖prox_{r2+Y}(y + ∇_y g − ∇_y c λ) − y‖
///   r_λ = ‖Π_{K°}(λ + c(x, y)) − λ‖
/// Throws PreconditionViolation if λ ∉ K° or y ∉ Y beyond tol.
MolResidual kkt_residual_mol(const LiftedProblem &lifted, const Vec &x, const Vec &lambda,
                             const Vec &y, double tol = 1e-9);

/// ‖λ‖ / (1 + ‖∇_y g(x, y)‖): dimensionless multiplier growth indicator.
double multiplier_bound_monitor(const LiftedProblem &lifted, const Vec &x, const Vec &y,
                                const Vec &lambda);

} // namespace pfbe
