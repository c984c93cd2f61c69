#include "pfbe/problems.hpp"

#include "pfbe/sets.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace pfbe {

// RNG -----------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t &state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
} // namespace

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto &word : s_)
        word = splitmix64(sm);
}

std::uint64_t Xoshiro256pp::next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256pp::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double NormalStream::operator()() {
    if (cached_) {
        const double v = *cached_;
        cached_.reset();
        return v;
    }
    // 1 − U lies in (0, 1], keeping the log finite.
    const double u1 = 1.0 - rng_.uniform();
    const double u2 = rng_.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

double rng_standard_normal(NormalStream &state) { return state(); }

// Synthetic family ------------------------------------------------------------

SyntheticInstance SyntheticInstance::generate(Eigen::Index n, Eigen::Index p, double c,
                                              std::uint64_t seed) {
    if (n < 1 || p < 1)
        throw PreconditionViolation("synthetic instance: n and p must be at least 1");
    if (!(c > 0))
        throw PreconditionViolation("synthetic instance: c must be positive");
    SyntheticInstance inst;
    inst.n = n;
    inst.p = p;
    inst.c = c;
    inst.seed = seed;
    NormalStream normal(seed);
    inst.B.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            inst.B(i, j) = normal();
    inst.b.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        inst.b[i] = normal();
    inst.b /= inst.b.norm();
    return inst;
}

namespace {

class SyntheticObjective final : public FunctionOracle {
  public:
    SyntheticObjective(Mat B, Vec b, double lipschitz)
        : B_(std::move(B)), b_(std::move(b)), lipschitz_(lipschitz) {}

    Eigen::Index dim_x() const override { return B_.rows(); }
    Eigen::Index dim_y() const override { return B_.cols(); }
    double value(const Vec &x, const Vec &y) const override {
        return b_.dot(x) + x.dot(B_ * y) - 0.5 * y.squaredNorm();
    }
    Vec grad_x(const Vec &, const Vec &y) const override { return b_ + B_ * y; }
    Vec grad_y(const Vec &x, const Vec &y) const override { return B_.transpose() * x - y; }
    bool provides_hvp() const override { return true; }
    Vec hvp_xy(const Vec &, const Vec &, const Vec &v) const override { return B_ * v; }
    Vec hvp_yy(const Vec &, const Vec &, const Vec &v) const override { return -v; }
    double lipschitz_grad() const override { return lipschitz_; }
    double strong_concavity() const override { return 1.0; }

  private:
    Mat B_;
    Vec b_;
    double lipschitz_;
};

/// c(x, y) = x[0:k] + y[0:k] − c·1.
class SyntheticConstraint final : public ConstraintOracle {
  public:
    SyntheticConstraint(Eigen::Index n, Eigen::Index p, double c)
        : n_(n), p_(p), k_(std::min(n, p)), c_(c) {}

    Eigen::Index dim_x() const override { return n_; }
    Eigen::Index dim_y() const override { return p_; }
    Eigen::Index dim_c() const override { return k_; }
    Vec value(const Vec &x, const Vec &y) const override {
        return (x.head(k_) + y.head(k_)).array() - c_;
    }
    Vec jvp_x(const Vec &, const Vec &, const Vec &lambda) const override {
        Vec out = Vec::Zero(n_);
        out.head(k_) = lambda;
        return out;
    }
    Vec jvp_y(const Vec &, const Vec &, const Vec &lambda) const override {
        Vec out = Vec::Zero(p_);
        out.head(k_) = lambda;
        return out;
    }
    Vec dir_y(const Vec &, const Vec &, const Vec &v) const override { return v.head(k_); }
    bool provides_hvp() const override { return true; }
    Vec hvp_xy(const Vec &, const Vec &, const Vec &, const Vec &) const override {
        return Vec::Zero(n_);
    }
    Vec hvp_yy(const Vec &, const Vec &, const Vec &, const Vec &) const override {
        return Vec::Zero(p_);
    }

  private:
    Eigen::Index n_, p_, k_;
    double c_;
};

template <typename Apply>
double power_norm(Apply apply, Eigen::Index dim) {
    Vec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        v[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
    v.normalize();
    double est = 0;
    for (int it = 0; it < 5000; ++it) {
        Vec w = apply(apply(v));
        const double nw = w.norm();
        if (nw == 0)
            return 0;
        const double next = std::sqrt(nw);
        v = w / nw;
        const bool done = std::abs(next - est) <= 1e-12 * next;
        est = next;
        if (done)
            break;
    }
    return est;
}

double coupling_block_norm(const Mat &B) {
    // Hessian of g over (x, y): [[0, B], [Bᵀ, −I]].
    const Eigen::Index n = B.rows(), p = B.cols();
    auto apply = [&](const Vec &v) {
        Vec out(n + p);
        out.head(n) = B * v.tail(p);
        out.tail(p) = B.transpose() * v.head(n) - v.tail(p);
        return out;
    };
    return power_norm(apply, n + p);
}

} // namespace

double synthetic_lifted_lipschitz(const Mat &B) {
    const Eigen::Index n = B.rows(), p = B.cols(), k = std::min(n, p);
    // H over (x, λ, y): xλ = −E, xy = B, λy = −E, yy = −I, applied matrix-free.
    auto apply = [&](const Vec &v) {
        const auto x = v.head(n), lam = v.segment(n, k), y = v.tail(p);
        Vec out = Vec::Zero(n + k + p);
        out.head(n) = B * y;
        out.head(k) -= lam;
        out.segment(n, k) = -x.head(k) - y.head(k);
        out.tail(p) = B.transpose() * x - y;
        out.tail(p).head(k) -= lam;
        return out;
    };
    return power_norm(apply, n + k + p);
}

SyntheticInstance SyntheticInstance::scalar(double c) {
    SyntheticInstance inst;
    inst.n = inst.p = 1;
    inst.c = c;
    inst.B = Mat::Ones(1, 1);
    inst.b = Vec::Ones(1);
    return inst;
}

CoupledProblem make_synthetic(const SyntheticInstance &inst) {
    check_dim(inst.B.rows(), inst.n, "synthetic B rows");
    check_dim(inst.B.cols(), inst.p, "synthetic B cols");
    check_dim(inst.b.size(), inst.n, "synthetic b");
    CoupledProblem prob;
    prob.g = std::make_shared<const SyntheticObjective>(inst.B, inst.b,
                                                        coupling_block_norm(inst.B));
    prob.r1 = std::make_shared<const ZeroRegularizer>();
    prob.c = std::make_shared<const SyntheticConstraint>(inst.n, inst.p, inst.c);
    prob.X = BoxSet::uniform(inst.n, 0.0, 1.0);
    prob.Y = std::make_shared<const WholeSpace>(inst.p);
    prob.K = std::make_shared<const OrthantCone>(Orthant::nonpos, inst.k());
    prob.lifted_lipschitz = synthetic_lifted_lipschitz(inst.B);
    prob.validate();
    return prob;
}

CoupledProblem make_synthetic(Eigen::Index n, Eigen::Index p, double c, std::uint64_t seed) {
    return make_synthetic(SyntheticInstance::generate(n, p, c, seed));
}

// Example 1 -------------------------------------------------------------------

namespace {

class Example1Objective final : public FunctionOracle {
  public:
    Eigen::Index dim_x() const override { return 1; }
    Eigen::Index dim_y() const override { return 1; }
    double value(const Vec &x, const Vec &y) const override {
        const double d = y[0] - 2 * x[0];
        return -0.5 * d * d;
    }
    Vec grad_x(const Vec &x, const Vec &y) const override {
        return Vec::Constant(1, 2 * (y[0] - 2 * x[0]));
    }
    Vec grad_y(const Vec &x, const Vec &y) const override {
        return Vec::Constant(1, -(y[0] - 2 * x[0]));
    }
    bool provides_hvp() const override { return true; }
    Vec hvp_xy(const Vec &, const Vec &, const Vec &v) const override { return 2 * v; }
    Vec hvp_yy(const Vec &, const Vec &, const Vec &v) const override { return -v; }
    // Hessian [[−4, 2], [2, −1]] has eigenvalues 0 and −5.
    double lipschitz_grad() const override { return 5.0; }
    double strong_concavity() const override { return 1.0; }
};

class Example1Constraint final : public ConstraintOracle {
  public:
    Eigen::Index dim_x() const override { return 1; }
    Eigen::Index dim_y() const override { return 1; }
    Eigen::Index dim_c() const override { return 2; }
    Vec value(const Vec &x, const Vec &y) const override {
        const double x4 = x[0] * x[0] * x[0] * x[0];
        return Vec{{y[0] - x[0], y[0] - x4}};
    }
    Vec jvp_x(const Vec &x, const Vec &, const Vec &lambda) const override {
        return Vec::Constant(1, -lambda[0] - 4 * x[0] * x[0] * x[0] * lambda[1]);
    }
    Vec jvp_y(const Vec &, const Vec &, const Vec &lambda) const override {
        return Vec::Constant(1, lambda[0] + lambda[1]);
    }
    Vec dir_y(const Vec &, const Vec &, const Vec &v) const override {
        return Vec{{v[0], v[0]}};
    }
    bool provides_hvp() const override { return true; }
    Vec hvp_xy(const Vec &, const Vec &, const Vec &, const Vec &) const override {
        return Vec::Zero(1);
    }
    Vec hvp_yy(const Vec &, const Vec &, const Vec &, const Vec &) const override {
        return Vec::Zero(1);
    }
};

} // namespace

CoupledProblem make_example1() {
    CoupledProblem prob;
    prob.g = std::make_shared<const Example1Objective>();
    prob.r1 = std::make_shared<const ZeroRegularizer>();
    prob.c = std::make_shared<const Example1Constraint>();
    prob.X = BoxSet::uniform(1, 1.0, 10.0);
    prob.Y = std::make_shared<const WholeSpace>(1);
    prob.K = std::make_shared<const OrthantCone>(Orthant::nonpos, 2);

    // Hessian of L over (x, λ1, λ2, y) at x = 10, λ = 0.
    const double x = 10.0;
    Mat H{{-4.0, 1.0, 4 * x * x * x, 2.0},
          {1.0, 0.0, 0.0, -1.0},
          {4 * x * x * x, 0.0, 0.0, -1.0},
          {2.0, -1.0, -1.0, -1.0}};
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    prob.lifted_lipschitz = es.eigenvalues().cwiseAbs().maxCoeff();
    prob.validate();
    return prob;
}

// Decoupled quadratic ---------------------------------------------------------

DecoupledQuadratic make_decoupled_quadratic() {
    const Vec q{{1.0, 2.0}}, d{{0.5, -3.0}}, e{{0.3, 2.0}};
    CallbackFunction::Parts parts;
    parts.n = parts.p = 2;
    parts.value = [=](const Vec &x, const Vec &y) {
        return 0.5 * x.dot(q.cwiseProduct(x)) + d.dot(x) - 0.5 * (y - e).squaredNorm();
    };
    parts.grad_x = [=](const Vec &x, const Vec &) -> Vec { return q.cwiseProduct(x) + d; };
    parts.grad_y = [=](const Vec &, const Vec &y) -> Vec { return e - y; };
    parts.hvp_xy = [](const Vec &, const Vec &, const Vec &) -> Vec { return Vec::Zero(2); };
    parts.hvp_yy = [](const Vec &, const Vec &, const Vec &v) -> Vec { return -v; };
    parts.lipschitz = 2.0;
    parts.mu = 1.0;

    DecoupledQuadratic out;
    out.problem.f = std::make_shared<const CallbackFunction>(parts);
    out.problem.r1 = std::make_shared<const ZeroRegularizer>();
    out.problem.r2 = std::make_shared<const ZeroRegularizer>();
    out.problem.X = BoxSet::uniform(2, -1.0, 1.0);
    out.problem.Y = BoxSet::uniform(2, -1.0, 1.0);
    out.problem.validate();
    out.x_star = Vec{{-0.5, 1.0}};
    out.y_star = Vec{{0.3, 1.0}};
    return out;
}

StartPoint default_start(const CoupledProblem &problem) {
    StartPoint s;
    s.x = problem.X->project(Vec::Zero(problem.n()));
    if (auto box = std::dynamic_pointer_cast<const BoxSet>(problem.X);
        box && box->lo().allFinite() && box->hi().allFinite())
        s.x = 0.5 * (box->lo() + box->hi());
    s.lambda = problem.K->polar()->project(Vec::Zero(problem.m()));
    s.y = problem.Y->project(Vec::Zero(problem.p()));
    return s;
}

} // namespace pfbe
