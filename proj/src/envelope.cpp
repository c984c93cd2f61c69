#include "pfbe/envelope.hpp"

#include "pfbe/sets.hpp"

#include <algorithm>
#include <cmath>

namespace pfbe {

EnvelopeConfig::EnvelopeConfig(const MinimaxProblem &problem, double eta, double alpha)
    : eta_(eta), alpha_(alpha) {
    if (!(eta_ > 0) || !std::isfinite(eta_))
        throw PreconditionViolation("EnvelopeConfig: eta must be positive");
    const double need = min_alpha(eta_, problem.mu());
    // Relative slack so that min_alpha() itself is always admissible.
    if (!(alpha_ >= need * (1 - 1e-15)))
        throw PreconditionViolation("EnvelopeConfig: alpha must be at least max{1, 2/(eta*mu)}");
}

double EnvelopeConfig::min_alpha(double eta, double mu) { return std::max(1.0, 2.0 / (eta * mu)); }

EnvelopeConfig EnvelopeConfig::theorem_default(const MinimaxProblem &problem) {
    const double eta = std::min(1.0, 1.0 / (2.0 * problem.lipschitz()));
    return EnvelopeConfig(problem, eta, min_alpha(eta, problem.mu()));
}

namespace {

void require_in_y(const MinimaxProblem &problem, const Vec &y) {
    if (!problem.Y->contains(y, 1e-9))
        throw PreconditionViolation("envelope: y must lie in Y");
}

} // namespace

ProxStep prox_step(const MinimaxProblem &problem, const EnvelopeConfig &cfg, const Vec &x,
                   const Vec &y) {
    require_in_y(problem, y);
    const double eta = cfg.eta();
    ProxStep out;
    out.T = problem.prox_y_step(y + eta * problem.f->grad_y(x, y), eta);
    out.R = (out.T - y) / eta;
    return out;
}

EnvelopeEval evaluate(const MinimaxProblem &problem, const EnvelopeConfig &cfg, const Vec &x,
                      const Vec &y, bool with_gradient) {
    require_in_y(problem, y);
    const double eta = cfg.eta();
    const double alpha = cfg.alpha();
    const auto &f = *problem.f;

    EnvelopeEval e;
    e.f = f.value(x, y);
    e.grad_y_f = f.grad_y(x, y);
    e.T = problem.prox_y_step(y + eta * e.grad_y_f, eta);
    const Vec step = e.T - y;
    e.R = step / eta;
    e.psi = e.f + e.grad_y_f.dot(step) - problem.r2->value(e.T) - step.squaredNorm() / (2 * eta);
    e.xi = alpha * e.psi - (alpha - 1) * e.f;
    e.gamma = e.xi + problem.r1->value(x) + (alpha - 1) * problem.r2->value(y);

    if (with_gradient) {
        const double ae = alpha * eta;
        e.grad_x = f.grad_x(x, y) + ae * hvp_xy(f, x, y, e.R, &e.used_fd_hvp);
        e.grad_y = e.R + ae * hvp_yy(f, x, y, e.R, &e.used_fd_hvp) +
                   (1 - alpha) * (e.grad_y_f - e.R);
        e.has_gradient = true;
    }
    return e;
}

double psi(const MinimaxProblem &problem, const EnvelopeConfig &cfg, const Vec &x, const Vec &y) {
    return evaluate(problem, cfg, x, y, false).psi;
}

double gamma(const MinimaxProblem &problem, const EnvelopeConfig &cfg, const Vec &x,
             const Vec &y) {
    return evaluate(problem, cfg, x, y, false).gamma;
}

GammaGradient grad_gamma(const MinimaxProblem &problem, const EnvelopeConfig &cfg, const Vec &x,
                         const Vec &y) {
    auto e = evaluate(problem, cfg, x, y, true);
    return {std::move(e.grad_x), std::move(e.grad_y), cfg.alpha() - 1};
}

Vec prox_y_weighted(const MinimaxProblem &problem, const Vec &z, double step, double weight) {
    if (weight <= 0 || problem.r2->is_zero())
        return problem.Y->project(z);
    return problem.prox_y_step(z, step * weight);
}

bool near_prox_kink(const MinimaxProblem &problem, const EnvelopeConfig &cfg, const Vec &x,
                    const Vec &y, double tol) {
    if (problem.Y->is_whole_space())
        return false;
    const auto ps = prox_step(problem, cfg, x, y);
    if (auto box = std::dynamic_pointer_cast<const BoxSet>(problem.Y)) {
        for (Eigen::Index i = 0; i < ps.T.size(); ++i) {
            if (std::isfinite(box->lo()[i]) && ps.T[i] - box->lo()[i] <= tol)
                return true;
            if (std::isfinite(box->hi()[i]) && box->hi()[i] - ps.T[i] <= tol)
                return true;
        }
        return false;
    }
    const Vec forward = y + cfg.eta() * problem.f->grad_y(x, y);
    return (forward - problem.Y->project(forward)).norm() > 0;
}

} // namespace pfbe
