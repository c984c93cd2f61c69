#include "pfbe/core.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pfbe {

void check_dim(Eigen::Index got, Eigen::Index want, const char *what) {
    if (got != want)
        throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                             ", got " + std::to_string(got));
}

Vec FunctionOracle::hvp_xy(const Vec &, const Vec &, const Vec &) const {
    throw IncompleteOracle("hvp_xy not provided by this oracle");
}

Vec FunctionOracle::hvp_yy(const Vec &, const Vec &, const Vec &) const {
    throw IncompleteOracle("hvp_yy not provided by this oracle");
}

Vec ConstraintOracle::hvp_xy(const Vec &, const Vec &, const Vec &, const Vec &) const {
    throw IncompleteOracle("constraint hvp_xy not provided");
}

Vec ConstraintOracle::hvp_yy(const Vec &, const Vec &, const Vec &, const Vec &) const {
    throw IncompleteOracle("constraint hvp_yy not provided");
}

// CallbackFunction ----------------------------------------------------------

CallbackFunction::CallbackFunction(Parts parts) : parts_(std::move(parts)) {
    if (!parts_.value || !parts_.grad_x || !parts_.grad_y)
        throw IncompleteOracle("CallbackFunction requires value, grad_x and grad_y");
    if (!(parts_.mu > 0) || !(parts_.lipschitz > 0))
        throw PreconditionViolation("CallbackFunction requires mu > 0 and L_f > 0");
}

double CallbackFunction::value(const Vec &x, const Vec &y) const { return parts_.value(x, y); }
Vec CallbackFunction::grad_x(const Vec &x, const Vec &y) const { return parts_.grad_x(x, y); }
Vec CallbackFunction::grad_y(const Vec &x, const Vec &y) const { return parts_.grad_y(x, y); }
bool CallbackFunction::provides_hvp() const { return parts_.hvp_xy && parts_.hvp_yy; }

Vec CallbackFunction::hvp_xy(const Vec &x, const Vec &y, const Vec &v) const {
    if (!parts_.hvp_xy)
        return FunctionOracle::hvp_xy(x, y, v);
    return parts_.hvp_xy(x, y, v);
}

Vec CallbackFunction::hvp_yy(const Vec &x, const Vec &y, const Vec &v) const {
    if (!parts_.hvp_yy)
        return FunctionOracle::hvp_yy(x, y, v);
    return parts_.hvp_yy(x, y, v);
}

// CallbackConstraint --------------------------------------------------------

CallbackConstraint::CallbackConstraint(Parts parts) : parts_(std::move(parts)) {
    if (!parts_.value)
        throw IncompleteOracle("CallbackConstraint requires value");
}

bool CallbackConstraint::complete() const {
    return parts_.jvp_x && parts_.jvp_y && parts_.dir_y;
}

Vec CallbackConstraint::value(const Vec &x, const Vec &y) const { return parts_.value(x, y); }

Vec CallbackConstraint::jvp_x(const Vec &x, const Vec &y, const Vec &lambda) const {
    if (!parts_.jvp_x)
        throw IncompleteOracle("constraint jvp_x not provided");
    return parts_.jvp_x(x, y, lambda);
}

Vec CallbackConstraint::jvp_y(const Vec &x, const Vec &y, const Vec &lambda) const {
    if (!parts_.jvp_y)
        throw IncompleteOracle("constraint jvp_y not provided");
    return parts_.jvp_y(x, y, lambda);
}

Vec CallbackConstraint::dir_y(const Vec &x, const Vec &y, const Vec &v) const {
    if (!parts_.dir_y)
        throw IncompleteOracle("constraint dir_y not provided");
    return parts_.dir_y(x, y, v);
}

bool CallbackConstraint::provides_hvp() const { return parts_.hvp_xy && parts_.hvp_yy; }

Vec CallbackConstraint::hvp_xy(const Vec &x, const Vec &y, const Vec &lambda,
                               const Vec &v) const {
    if (!parts_.hvp_xy)
        return ConstraintOracle::hvp_xy(x, y, lambda, v);
    return parts_.hvp_xy(x, y, lambda, v);
}

Vec CallbackConstraint::hvp_yy(const Vec &x, const Vec &y, const Vec &lambda,
                               const Vec &v) const {
    if (!parts_.hvp_yy)
        return ConstraintOracle::hvp_yy(x, y, lambda, v);
    return parts_.hvp_yy(x, y, lambda, v);
}

// Prox composition ----------------------------------------------------------

Vec composite_prox(const ProxRegularizer &reg, const ProjectableSet &set,
                   const FusedProx &fused, const Vec &z, double step) {
    check_dim(z.size(), set.dim(), "composite_prox");
    if (!(step > 0))
        throw PreconditionViolation("composite_prox: step must be positive");
    if (fused)
        return fused(z, step);
    if (reg.is_zero())
        return set.project(z);
    if (set.is_whole_space())
        return reg.prox(z, step);
    throw IncompleteOracle("prox of r + indicator(set) needs a fused prox oracle");
}

// Problems ------------------------------------------------------------------

void MinimaxProblem::validate() const {
    if (!f || !r1 || !r2 || !X || !Y)
        throw IncompleteOracle("MinimaxProblem: missing component");
    check_dim(X->dim(), f->dim_x(), "MinimaxProblem X");
    check_dim(Y->dim(), f->dim_y(), "MinimaxProblem Y");
    if (!Y->is_convex())
        throw UnsupportedSet("MinimaxProblem: Y must be convex");
    if (!r2->is_convex())
        throw PreconditionViolation("MinimaxProblem: r2 must be convex");
    if (!(mu() > 0))
        throw PreconditionViolation("MinimaxProblem: mu must be positive");
}

Vec MinimaxProblem::prox_x_step(const Vec &z, double step) const {
    return composite_prox(*r1, *X, prox_x, z, step);
}

Vec MinimaxProblem::prox_y_step(const Vec &z, double step) const {
    return composite_prox(*r2, *Y, prox_y, z, step);
}

void CoupledProblem::validate() const {
    if (!g || !r1 || !c || !X || !Y || !K)
        throw IncompleteOracle("CoupledProblem: missing component");
    check_dim(X->dim(), g->dim_x(), "CoupledProblem X");
    check_dim(Y->dim(), g->dim_y(), "CoupledProblem Y");
    check_dim(c->dim_x(), g->dim_x(), "CoupledProblem c (x)");
    check_dim(c->dim_y(), g->dim_y(), "CoupledProblem c (y)");
    check_dim(K->dim(), c->dim_c(), "CoupledProblem K");
    if (!Y->is_convex())
        throw UnsupportedSet("CoupledProblem: Y must be convex");
}

// Finite differences --------------------------------------------------------

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double checked(double v, const char *where) {
    if (!std::isfinite(v))
        throw NonFiniteValue(std::string("non-finite value at probe point in ") + where);
    return v;
}

void check_finite(const Vec &v, const char *where) {
    if (!v.allFinite())
        throw NonFiniteValue(std::string("non-finite gradient at probe point in ") + where);
}

} // namespace

double fd_grad_step(const Vec &, const Vec &y) { return std::sqrt(kEps) * (1.0 + y.norm()); }

double fd_hvp_step(const Vec &y) { return std::cbrt(kEps) * (1.0 + y.norm()); }

GradPair fd_gradient(const FunctionOracle &oracle, const Vec &x, const Vec &y, double h) {
    if (!(h > 0))
        throw PreconditionViolation("fd_gradient: h must be positive");
    check_dim(x.size(), oracle.dim_x(), "fd_gradient x");
    check_dim(y.size(), oracle.dim_y(), "fd_gradient y");
    GradPair out{Vec(x.size()), Vec(y.size())};
    Vec xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        const double fp = checked(oracle.value(xp, y), "fd_gradient");
        xp[i] = x[i] - h;
        const double fm = checked(oracle.value(xp, y), "fd_gradient");
        xp[i] = x[i];
        out.gx[i] = (fp - fm) / (2 * h);
    }
    Vec yp = y;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        yp[i] = y[i] + h;
        const double fp = checked(oracle.value(x, yp), "fd_gradient");
        yp[i] = y[i] - h;
        const double fm = checked(oracle.value(x, yp), "fd_gradient");
        yp[i] = y[i];
        out.gy[i] = (fp - fm) / (2 * h);
    }
    return out;
}

Vec fd_hvp_yy(const FunctionOracle &oracle, const Vec &x, const Vec &y, const Vec &v, double h) {
    const double nv = v.norm();
    if (nv == 0)
        throw ZeroDirection("fd_hvp_yy: direction must be nonzero");
    const Vec dir = v / nv;
    Vec gp = oracle.grad_y(x, y + h * dir);
    Vec gm = oracle.grad_y(x, y - h * dir);
    check_finite(gp, "fd_hvp_yy");
    check_finite(gm, "fd_hvp_yy");
    return (gp - gm) / (2 * h) * nv;
}

Vec fd_hvp_xy(const FunctionOracle &oracle, const Vec &x, const Vec &y, const Vec &v, double h) {
    const double nv = v.norm();
    if (nv == 0)
        throw ZeroDirection("fd_hvp_xy: direction must be nonzero");
    const Vec dir = v / nv;
    Vec gp = oracle.grad_x(x, y + h * dir);
    Vec gm = oracle.grad_x(x, y - h * dir);
    check_finite(gp, "fd_hvp_xy");
    check_finite(gm, "fd_hvp_xy");
    return (gp - gm) / (2 * h) * nv;
}

Vec hvp_yy(const FunctionOracle &oracle, const Vec &x, const Vec &y, const Vec &v,
           bool *used_fd) {
    if (oracle.provides_hvp())
        return oracle.hvp_yy(x, y, v);
    if (used_fd)
        *used_fd = true;
    if (v.norm() == 0)
        return Vec::Zero(y.size());
    return fd_hvp_yy(oracle, x, y, v, fd_hvp_step(y));
}

Vec hvp_xy(const FunctionOracle &oracle, const Vec &x, const Vec &y, const Vec &v,
           bool *used_fd) {
    if (oracle.provides_hvp())
        return oracle.hvp_xy(x, y, v);
    if (used_fd)
        *used_fd = true;
    if (v.norm() == 0)
        return Vec::Zero(x.size());
    return fd_hvp_xy(oracle, x, y, v, fd_hvp_step(y));
}

} // namespace pfbe
