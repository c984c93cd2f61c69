#include "helpers.hpp"

#include "pfbe/lagrangian.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace pfbe;

// Reference values from an independent implementation of splitmix64 seeding,
// xoshiro256++ and Box-Muller.
TEST_CASE("seed 42 stream") {
    Xoshiro256pp rng(42);
    CHECK(rng.next() == 0xd0764d4f4476689fULL);
    CHECK(rng.next() == 0x519e4174576f3791ULL);
    CHECK(rng.next() == 0xfbe07cfb0c24ed8cULL);

    Xoshiro256pp u(42);
    CHECK(u.uniform() == 0.8143051451229099);
    CHECK(u.uniform() == 0.3188210400616611);

    NormalStream normal(42);
    CHECK(rng_standard_normal(normal) == doctest::Approx(-0.7689930538210061).epsilon(1e-15));
    CHECK(rng_standard_normal(normal) == doctest::Approx(1.6661184587142).epsilon(1e-14));
}

TEST_CASE("splitmix64 first output") {
    std::uint64_t state = 0;
    CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
    CHECK(state == 0x9e3779b97f4a7c15ULL);
}

TEST_CASE("uniform draws stay in [0, 1)") {
    Xoshiro256pp rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK((u >= 0.0 && u < 1.0));
    }
}

TEST_CASE("synthetic instances are deterministic") {
    const auto a = SyntheticInstance::generate(6, 4, 0.5, 99);
    const auto b = SyntheticInstance::generate(6, 4, 0.5, 99);
    CHECK(a.B == b.B);
    CHECK(a.b == b.b);
    CHECK(a.b.norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.k() == 4);
    const auto c = SyntheticInstance::generate(6, 4, 0.5, 100);
    CHECK(a.B != c.B);

    // B is drawn row-major first, then b.
    NormalStream normal(99);
    CHECK(a.B(0, 0) == rng_standard_normal(normal));
    CHECK(a.B(0, 1) == rng_standard_normal(normal));
}

TEST_CASE("scalar synthetic oracles match hand formulas") {
    const auto cp = make_synthetic(SyntheticInstance::scalar());
    Xoshiro256pp rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const double x = rng.uniform(), y = 4 * rng.uniform() - 2;
        const Vec xv{{x}}, yv{{y}};
        CHECK(cp.g->value(xv, yv) == doctest::Approx(x + x * y - 0.5 * y * y).epsilon(1e-15));
        CHECK(cp.g->grad_x(xv, yv)[0] == doctest::Approx(1 + y).epsilon(1e-15));
        CHECK(cp.g->grad_y(xv, yv)[0] == doctest::Approx(x - y).epsilon(1e-15));
        CHECK(cp.c->value(xv, yv)[0] == doctest::Approx(x + y - 1).epsilon(1e-15));
    }
    CHECK(cp.mu() == 1.0);
    CHECK(cp.X->contains(Vec{{1.0}}, 0));
    CHECK_FALSE(cp.X->contains(Vec{{1.1}}, 1e-9));
}

TEST_CASE("synthetic lifted Lipschitz constant bounds the Hessian") {
    const auto inst = SyntheticInstance::generate(4, 3, 1.0, 6);
    const double L = synthetic_lifted_lipschitz(inst.B);
    // Hessian over (x, λ, y): [[0, −E, B], [−Eᵀ, 0, −I], [Bᵀ, −I, −I]].
    Mat H = Mat::Zero(10, 10);
    H.block(0, 4, 3, 3) = -Mat::Identity(3, 3);
    H.block(4, 0, 3, 3) = -Mat::Identity(3, 3);
    H.block(0, 7, 4, 3) = inst.B;
    H.block(7, 0, 3, 4) = inst.B.transpose();
    H.block(4, 7, 3, 3) = -Mat::Identity(3, 3);
    H.block(7, 4, 3, 3) = -Mat::Identity(3, 3);
    H.block(7, 7, 3, 3) = -Mat::Identity(3, 3);
    const Eigen::SelfAdjointEigenSolver<Mat> es(H);
    const double want = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(L == doctest::Approx(want).epsilon(1e-8));
    CHECK(lift(make_synthetic(inst)).mm.lipschitz() == L);
}

TEST_CASE("example1 data") {
    const auto cp = make_example1();
    CHECK(cp.n() == 1);
    CHECK(cp.p() == 1);
    CHECK(cp.m() == 2);
    const Vec c = cp.c->value(Vec{{2.0}}, Vec{{3.0}});
    CHECK(c == Vec{{1.0, 3.0 - 16.0}});
    CHECK(cp.g->value(Vec{{2.0}}, Vec{{3.0}}) == -0.5);
    CHECK(cp.X->contains(Vec{{10.0}}, 0));
    CHECK_FALSE(cp.X->contains(Vec{{0.5}}, 1e-9));
    const auto lp = lift(cp);
    CHECK(kkt_residual_mol(lp, Vec{{1.0}}, Vec{{2.0 / 3, 1.0 / 3}}, Vec{{1.0}}).max() <= 1e-12);
}

TEST_CASE("decoupled quadratic optimum") {
    const auto dq = make_decoupled_quadratic();
    CHECK(dq.x_star == Vec{{-0.5, 1.0}});
    CHECK(dq.y_star == Vec{{0.3, 1.0}});
    CHECK(dq.problem.lipschitz() == 2.0);
    CHECK(dq.problem.mu() == 1.0);
}

TEST_CASE("default start points") {
    const auto s = default_start(make_synthetic(3, 2, 1.0, 1));
    CHECK(s.x == Vec::Constant(3, 0.5));
    CHECK(s.lambda == Vec::Zero(2));
    CHECK(s.y == Vec::Zero(2));
    const auto e = default_start(make_example1());
    CHECK(e.x[0] == 5.5);
    CHECK(e.lambda == Vec::Zero(2));
}
