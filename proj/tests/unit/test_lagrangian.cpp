#include "helpers.hpp"

#include "pfbe/lagrangian.hpp"

#include <doctest.h>

#include <cmath>

using namespace pfbe;
using testing::random_vec;

TEST_CASE("example1 lift matches the closed-form Lagrangian") {
    const auto lp = lift(make_example1());
    CHECK(lp.n() == 1);
    CHECK(lp.m() == 2);
    CHECK(lp.mm.n() == 3);
    Xoshiro256pp rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const double x = 1 + 9 * rng.uniform(), l1 = rng.uniform(), l2 = rng.uniform();
        const double y = 20 * rng.uniform() - 5;
        const double want = -0.5 * (y - 2 * x) * (y - 2 * x) - l1 * (y - x) -
                            l2 * (y - std::pow(x, 4));
        const double got = lp.mm.f->value(Vec{{x, l1, l2}}, Vec{{y}});
        CHECK(got == doctest::Approx(want).epsilon(1e-13));
    }
    CHECK(lp.K_polar->contains(Vec{{0.5, 0.0}}, 0));
    CHECK_FALSE(lp.K_polar->contains(Vec{{-0.5, 0.0}}, 1e-9));
}

TEST_CASE("synthetic lift matches the closed-form Lagrangian and its gradients") {
    const auto inst = SyntheticInstance::generate(3, 2, 0.7, 4);
    const auto lp = lift(make_synthetic(inst));
    Xoshiro256pp rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec x = random_vec(rng, 3, 0, 1), lam = random_vec(rng, 2, 0, 2);
        const Vec y = random_vec(rng, 2);
        // c(x, y) = x_{1..k} + y_{1..k} − c with k = min(n, p) coupled coordinates.
        const Vec cval = x.head(2) + y - Vec::Constant(2, 0.7);
        const double want = inst.b.dot(x) + x.dot(inst.B * y) - 0.5 * y.squaredNorm() -
                            lam.dot(cval);
        const Vec z = lp.join(x, lam);
        CHECK(lp.mm.f->value(z, y) == doctest::Approx(want).epsilon(1e-13));

        const auto g = fd_gradient(*lp.mm.f, z, y, 1e-6);
        CHECK((g.gx - lp.mm.f->grad_x(z, y)).norm() < 1e-7);
        CHECK((g.gy - lp.mm.f->grad_y(z, y)).norm() < 1e-7);
        CHECK(lp.mm.f->provides_hvp());
        const Vec v = random_vec(rng, 2);
        CHECK((lp.mm.f->hvp_yy(z, y, v) + v).norm() < 1e-14);
    }
}

namespace {

CoupledProblem with_zero_constraint(bool complete) {
    CoupledProblem cp;
    cp.g = testing::bilinear_quadratic(Mat::Identity(2, 2), Vec{{1, 0}});
    cp.r1 = std::make_shared<ZeroRegularizer>();
    CallbackConstraint::Parts c;
    c.n = 2;
    c.p = 2;
    c.m = 1;
    c.value = [](const Vec &, const Vec &) { return Vec::Zero(1); };
    c.jvp_x = [](const Vec &, const Vec &, const Vec &) { return Vec::Zero(2); };
    if (complete) {
        c.jvp_y = [](const Vec &, const Vec &, const Vec &) { return Vec::Zero(2); };
        c.dir_y = [](const Vec &, const Vec &, const Vec &) { return Vec::Zero(1); };
    }
    cp.c = std::make_shared<CallbackConstraint>(c);
    cp.X = BoxSet::uniform(2, 0, 1);
    cp.Y = std::make_shared<WholeSpace>(2);
    cp.K = std::make_shared<OrthantCone>(Orthant::nonpos, 1);
    return cp;
}

} // namespace

TEST_CASE("a zero constraint map leaves the inner problem unchanged") {
    const auto cp = with_zero_constraint(true);
    const auto lp = lift(cp);
    Xoshiro256pp rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec x = random_vec(rng, 2, 0, 1), y = random_vec(rng, 2);
        const Vec z = lp.join(x, Vec::Zero(1));
        CHECK(lp.mm.f->value(z, y) == cp.g->value(x, y));
        CHECK(lp.mm.f->grad_y(z, y) == cp.g->grad_y(x, y));
        CHECK(lp.mm.f->grad_x(z, y).head(2) == cp.g->grad_x(x, y));
    }
}

TEST_CASE("lift rejects constraint oracles without Jacobian products") {
    CHECK_THROWS_AS(lift(with_zero_constraint(false)), IncompleteOracle);
}

TEST_CASE("KKT residuals on example1") {
    const auto lp = lift(make_example1());
    SUBCASE("spurious point") {
        const auto r = kkt_residual_mol(lp, Vec{{1.0}}, Vec{{2.0 / 3, 1.0 / 3}}, Vec{{1.0}});
        CHECK(r.max() <= 1e-12);
    }
    SUBCASE("true minimax point with its multiplier") {
        // y-stationarity at (10, 10) with the second constraint slack gives λ = (10, 0).
        const auto r = kkt_residual_mol(lp, Vec{{10.0}}, Vec{{10.0, 0.0}}, Vec{{10.0}});
        CHECK(r.max() <= 1e-10);
    }
    SUBCASE("a nonstationary point has a positive residual") {
        const auto r = kkt_residual_mol(lp, Vec{{5.0}}, Vec{{0.0, 0.0}}, Vec{{0.0}});
        CHECK(r.max() > 1);
    }
    SUBCASE("multiplier outside the polar cone") {
        CHECK_THROWS_AS(kkt_residual_mol(lp, Vec{{2.0}}, Vec{{-0.1, 0.3}}, Vec{{1.0}}),
                        PreconditionViolation);
    }
}

TEST_CASE("multiplier bound monitor") {
    const auto lp = lift(make_example1());
    CHECK(multiplier_bound_monitor(lp, Vec{{3.0}}, Vec{{1.0}}, Vec::Zero(2)) == 0.0);
    // ‖λ‖ = √5/3 and ∇_y g = 1 at (1, 1).
    const double m = multiplier_bound_monitor(lp, Vec{{1.0}}, Vec{{1.0}}, Vec{{2.0 / 3, 1.0 / 3}});
    CHECK(m == doctest::Approx(std::sqrt(5.0) / 6).epsilon(1e-14));
    CHECK(m == doctest::Approx(0.3727).epsilon(1e-4));
}
