#pragma once

#include "pfbe/core.hpp"
#include "pfbe/problems.hpp"
#include "pfbe/sets.hpp"

#include <memory>

namespace testing {

using pfbe::Vec;

inline Vec random_vec(pfbe::Xoshiro256pp &rng, Eigen::Index n, double lo = -1, double hi = 1) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * rng.uniform();
    return v;
}

// f(x, y) = ⟨b, x⟩ + ⟨x, By⟩ − ½‖y‖² with exact oracles.
inline std::shared_ptr<pfbe::CallbackFunction> bilinear_quadratic(const pfbe::Mat &B,
                                                                  const Vec &b) {
    pfbe::CallbackFunction::Parts p;
    p.n = B.rows();
    p.p = B.cols();
    p.value = [B, b](const Vec &x, const Vec &y) {
        return b.dot(x) + x.dot(B * y) - 0.5 * y.squaredNorm();
    };
    p.grad_x = [B, b](const Vec &, const Vec &y) -> Vec { return b + B * y; };
    p.grad_y = [B](const Vec &x, const Vec &y) -> Vec { return B.transpose() * x - y; };
    p.hvp_xy = [B](const Vec &, const Vec &, const Vec &v) -> Vec { return B * v; };
    p.hvp_yy = [](const Vec &, const Vec &, const Vec &v) -> Vec { return -v; };
    p.lipschitz = 1 + B.norm();
    p.mu = 1;
    return std::make_shared<pfbe::CallbackFunction>(p);
}

// One-dimensional f(x, y) from a value closure and its two partials.
inline std::shared_ptr<pfbe::CallbackFunction>
scalar_function(std::function<double(double, double)> f, std::function<double(double, double)> fx,
                std::function<double(double, double)> fy, double L = 1, double mu = 1) {
    pfbe::CallbackFunction::Parts p;
    p.n = 1;
    p.p = 1;
    p.value = [f](const Vec &x, const Vec &y) { return f(x[0], y[0]); };
    p.grad_x = [fx](const Vec &x, const Vec &y) { return Vec::Constant(1, fx(x[0], y[0])); };
    p.grad_y = [fy](const Vec &x, const Vec &y) { return Vec::Constant(1, fy(x[0], y[0])); };
    p.lipschitz = L;
    p.mu = mu;
    return std::make_shared<pfbe::CallbackFunction>(p);
}

} // namespace testing

namespace testing {

inline pfbe::MinimaxProblem
minimax(std::shared_ptr<const pfbe::FunctionOracle> f, std::shared_ptr<const pfbe::ProjectableSet> X,
        std::shared_ptr<const pfbe::ProjectableSet> Y,
        std::shared_ptr<const pfbe::ProxRegularizer> r2 = nullptr) {
    pfbe::MinimaxProblem mm;
    mm.f = std::move(f);
    mm.X = std::move(X);
    mm.Y = std::move(Y);
    mm.r1 = std::make_shared<pfbe::ZeroRegularizer>();
    mm.r2 = r2 ? std::move(r2) : std::make_shared<pfbe::ZeroRegularizer>();
    return mm;
}

// f(x, y) = −(y − a)²/2 on R × Y.
inline pfbe::MinimaxProblem concave_scalar(double a, std::shared_ptr<const pfbe::ProjectableSet> Y) {
    auto f = scalar_function([a](double, double y) { return -0.5 * (y - a) * (y - a); },
                             [](double, double) { return 0.0; },
                             [a](double, double y) { return -(y - a); });
    return minimax(f, std::make_shared<pfbe::WholeSpace>(1), std::move(Y));
}

} // namespace testing
