#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace pfbe;
using testing::random_vec;

TEST_CASE("fd gradient of a bilinear function is exact up to roundoff") {
    auto f = testing::scalar_function([](double x, double y) { return x * y; },
                                      [](double, double y) { return y; },
                                      [](double x, double) { return x; });
    const auto g = fd_gradient(*f, Vec::Constant(1, 2.0), Vec::Constant(1, 3.0), 1e-6);
    CHECK(g.gx[0] == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(g.gy[0] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("fd gradient of -y^2/2") {
    auto f = testing::scalar_function([](double, double y) { return -0.5 * y * y; },
                                      [](double, double) { return 0.0; },
                                      [](double, double y) { return -y; });
    const auto g = fd_gradient(*f, Vec::Constant(1, 0.7), Vec::Constant(1, 1.0), 1e-6);
    CHECK(std::abs(g.gy[0] + 1.0) < 1e-8);
}

TEST_CASE("fd gradient matches the analytic synthetic gradient") {
    Xoshiro256pp rng(5);
    const Mat B = Mat::NullaryExpr(3, 3, [&] { return rng.uniform() - 0.5; });
    const Vec b = random_vec(rng, 3);
    auto f = testing::bilinear_quadratic(B, b);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec x = random_vec(rng, 3), y = random_vec(rng, 3);
        const auto g = fd_gradient(*f, x, y, fd_grad_step(x, y));
        CHECK((g.gx - (b + B * y)).norm() < 1e-7);
        CHECK((g.gy - (B.transpose() * x - y)).norm() < 1e-7);
    }
}

TEST_CASE("fd gradient rejects non-finite values") {
    auto f = testing::scalar_function(
        [](double x, double) { return x > 0 ? std::numeric_limits<double>::quiet_NaN() : 0.0; },
        [](double, double) { return 0.0; }, [](double, double) { return 0.0; });
    CHECK_THROWS_AS(fd_gradient(*f, Vec::Constant(1, 1.0), Vec::Zero(1), 1e-6), NonFiniteValue);
}

TEST_CASE("fd hessian-vector products") {
    Xoshiro256pp rng(9);
    const Mat B = Mat::NullaryExpr(3, 2, [&] { return rng.uniform() - 0.5; });
    auto f = testing::bilinear_quadratic(B, Vec::Zero(3));
    const Vec x = random_vec(rng, 3), y = random_vec(rng, 2);

    SUBCASE("yy block of -|y|^2/2 is -I") {
        const Vec e1 = Vec::Unit(2, 0);
        CHECK((fd_hvp_yy(*f, x, y, e1, fd_hvp_step(y)) + e1).norm() < 1e-6);
    }
    SUBCASE("random direction matches the exact products") {
        const Vec v = random_vec(rng, 2);
        CHECK((fd_hvp_yy(*f, x, y, v, fd_hvp_step(y)) + v).norm() < 1e-6);
        CHECK((fd_hvp_xy(*f, x, y, v, fd_hvp_step(y)) - B * v).norm() < 1e-6);
    }
    SUBCASE("zero direction") {
        CHECK_THROWS_AS(fd_hvp_yy(*f, x, y, Vec::Zero(2), 1e-4), ZeroDirection);
        CHECK_THROWS_AS(fd_hvp_xy(*f, x, y, Vec::Zero(2), 1e-4), ZeroDirection);
    }
}

TEST_CASE("bilinear coupling has a zero yy block") {
    CallbackFunction::Parts p;
    p.n = 2;
    p.p = 2;
    p.value = [](const Vec &x, const Vec &y) { return x.dot(y); };
    p.grad_x = [](const Vec &, const Vec &y) { return y; };
    p.grad_y = [](const Vec &x, const Vec &) { return x; };
    CallbackFunction f(p);
    CHECK_FALSE(f.provides_hvp());
    bool used_fd = false;
    const Vec r = hvp_yy(f, Vec::Ones(2), Vec::Ones(2), Vec::Unit(2, 1), &used_fd);
    CHECK(used_fd);
    CHECK(r.norm() < 1e-9);
}

TEST_CASE("exact hvp is preferred when provided") {
    auto f = testing::bilinear_quadratic(Mat::Identity(2, 2), Vec::Zero(2));
    bool used_fd = false;
    const Vec r = hvp_yy(*f, Vec::Ones(2), Vec::Ones(2), Vec::Unit(2, 0), &used_fd);
    CHECK_FALSE(used_fd);
    CHECK(r[0] == -1.0);
}

TEST_CASE("problem validation catches dimension mismatches") {
    MinimaxProblem mm;
    mm.f = testing::bilinear_quadratic(Mat::Identity(2, 2), Vec::Zero(2));
    mm.r1 = std::make_shared<ZeroRegularizer>();
    mm.r2 = std::make_shared<ZeroRegularizer>();
    mm.X = BoxSet::uniform(3, 0, 1);
    mm.Y = std::make_shared<WholeSpace>(2);
    CHECK_THROWS_AS(mm.validate(), DimensionError);
    mm.X = BoxSet::uniform(2, 0, 1);
    CHECK_NOTHROW(mm.validate());
    mm.Y = std::make_shared<SphereSet>(Vec::Zero(2), 1.0);
    CHECK_THROWS_AS(mm.validate(), UnsupportedSet);
}
