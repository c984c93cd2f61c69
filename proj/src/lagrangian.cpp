#include "pfbe/lagrangian.hpp"

#include "pfbe/sets.hpp"

#include <algorithm>

namespace pfbe {

LagrangianOracle::LagrangianOracle(std::shared_ptr<const FunctionOracle> g,
                                   std::shared_ptr<const ConstraintOracle> c, double lipschitz)
    : g_(std::move(g)), c_(std::move(c)), n_(g_->dim_x()), m_(c_->dim_c()),
      lipschitz_(lipschitz) {}

double LagrangianOracle::value(const Vec &z, const Vec &y) const {
    check_dim(z.size(), n_ + m_, "LagrangianOracle z");
    const Vec x = z.head(n_);
    return g_->value(x, y) - z.tail(m_).dot(c_->value(x, y));
}

Vec LagrangianOracle::grad_x(const Vec &z, const Vec &y) const {
    check_dim(z.size(), n_ + m_, "LagrangianOracle z");
    const Vec x = z.head(n_);
    const Vec lambda = z.tail(m_);
    Vec out(n_ + m_);
    out.head(n_) = g_->grad_x(x, y) - c_->jvp_x(x, y, lambda);
    out.tail(m_) = -c_->value(x, y);
    return out;
}

Vec LagrangianOracle::grad_y(const Vec &z, const Vec &y) const {
    check_dim(z.size(), n_ + m_, "LagrangianOracle z");
    const Vec x = z.head(n_);
    return g_->grad_y(x, y) - c_->jvp_y(x, y, z.tail(m_));
}

bool LagrangianOracle::provides_hvp() const { return g_->provides_hvp() && c_->provides_hvp(); }

Vec LagrangianOracle::hvp_xy(const Vec &z, const Vec &y, const Vec &v) const {
    if (!provides_hvp())
        return FunctionOracle::hvp_xy(z, y, v);
    const Vec x = z.head(n_);
    const Vec lambda = z.tail(m_);
    Vec out(n_ + m_);
    out.head(n_) = g_->hvp_xy(x, y, v) - c_->hvp_xy(x, y, lambda, v);
    out.tail(m_) = -c_->dir_y(x, y, v);
    return out;
}

Vec LagrangianOracle::hvp_yy(const Vec &z, const Vec &y, const Vec &v) const {
    if (!provides_hvp())
        return FunctionOracle::hvp_yy(z, y, v);
    const Vec x = z.head(n_);
    return g_->hvp_yy(x, y, v) - c_->hvp_yy(x, y, z.tail(m_), v);
}

// ---------------------------------------------------------------------------

namespace {

/// r1 acting on the x block of z = (x, λ).
class LiftedRegularizer final : public ProxRegularizer {
  public:
    LiftedRegularizer(std::shared_ptr<const ProxRegularizer> r1, Eigen::Index n)
        : r1_(std::move(r1)), n_(n) {}
    double value(const Vec &z) const override { return r1_->value(z.head(n_)); }
    Vec prox(const Vec &z, double step) const override {
        Vec out = z;
        out.head(n_) = r1_->prox(z.head(n_), step);
        return out;
    }
    bool is_zero() const override { return r1_->is_zero(); }
    bool is_convex() const override { return r1_->is_convex(); }

  private:
    std::shared_ptr<const ProxRegularizer> r1_;
    Eigen::Index n_;
};

} // namespace

Vec LiftedProblem::join(const Vec &x, const Vec &lambda) const {
    check_dim(x.size(), n(), "LiftedProblem::join x");
    check_dim(lambda.size(), m(), "LiftedProblem::join lambda");
    Vec z(n() + m());
    z << x, lambda;
    return z;
}

LiftedProblem lift(const CoupledProblem &problem, std::shared_ptr<const ProxRegularizer> r2_lift,
                   FusedProx prox_y) {
    problem.validate();
    if (auto cb = std::dynamic_pointer_cast<const CallbackConstraint>(problem.c);
        cb && !cb->complete())
        throw IncompleteOracle("lift: constraint oracle lacks Jacobian-vector products");

    LiftedProblem out;
    out.base = problem;
    out.K_polar = problem.K->polar();

    const double lip =
        problem.lifted_lipschitz > 0 ? problem.lifted_lipschitz : problem.g->lipschitz_grad();
    out.mm.f = std::make_shared<const LagrangianOracle>(problem.g, problem.c, lip);
    out.mm.r1 = std::make_shared<const LiftedRegularizer>(problem.r1, problem.n());
    out.mm.r2 = r2_lift ? std::move(r2_lift) : std::make_shared<const ZeroRegularizer>();
    out.mm.X = std::make_shared<const ProductSet>(
        std::vector<std::shared_ptr<const ProjectableSet>>{problem.X, out.K_polar});
    out.mm.Y = problem.Y;
    out.mm.prox_y = std::move(prox_y);

    const Eigen::Index n = problem.n();
    out.mm.prox_x = [r1 = problem.r1, X = problem.X, fused = problem.prox_x, Kp = out.K_polar,
                     n](const Vec &z, double step) {
        Vec res(z.size());
        res.head(n) = composite_prox(*r1, *X, fused, z.head(n), step);
        res.tail(z.size() - n) = Kp->project(z.tail(z.size() - n));
        return res;
    };
    out.mm.validate();
    return out;
}

double MolResidual::max() const { return std::max({r_x, r_y, r_lambda}); }

MolResidual kkt_residual_mol(const LiftedProblem &lifted, const Vec &x, const Vec &lambda,
                             const Vec &y, double tol) {
    const auto &base = lifted.base;
    check_dim(x.size(), lifted.n(), "kkt_residual_mol x");
    check_dim(lambda.size(), lifted.m(), "kkt_residual_mol lambda");
    check_dim(y.size(), lifted.p(), "kkt_residual_mol y");
    if (!lifted.K_polar->contains(lambda, tol))
        throw PreconditionViolation("kkt_residual_mol: lambda not in the polar cone");
    if (!base.Y->contains(y, tol))
        throw PreconditionViolation("kkt_residual_mol: y not in Y");

    const Vec dx = base.g->grad_x(x, y) - base.c->jvp_x(x, y, lambda);
    const Vec dy = base.g->grad_y(x, y) - base.c->jvp_y(x, y, lambda);
    const Vec cv = base.c->value(x, y);

    MolResidual r;
    r.r_x = (composite_prox(*base.r1, *base.X, base.prox_x, x - dx, 1.0) - x).norm();
    r.r_y = (lifted.mm.prox_y_step(y + dy, 1.0) - y).norm();
    r.r_lambda = (lifted.K_polar->project(lambda + cv) - lambda).norm();
    return r;
}

double multiplier_bound_monitor(const LiftedProblem &lifted, const Vec &x, const Vec &y,
                                const Vec &lambda) {
    return lambda.norm() / (1.0 + lifted.base.g->grad_y(x, y).norm());
}

} // namespace pfbe
