#include "helpers.hpp"

#include "pfbe/lagrangian.hpp"
#include "pfbe/solvers.hpp"

#include <doctest.h>

#include <cmath>

using namespace pfbe;

namespace {

SolverConfig tight(double gtol = 1e-10, long max_iter = 100000) {
    SolverConfig s;
    s.gtol = gtol;
    s.max_iter = max_iter;
    return s;
}

} // namespace

TEST_CASE("spg on the scalar lifted instance reaches a stationary point") {
    const auto cp = make_synthetic(SyntheticInstance::scalar());
    const auto lp = lift(cp);
    const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
    const auto st = default_start(cp);
    const auto res = solve_spg(lp.mm, cfg, tight(), lp.join(st.x, st.lambda), st.y);
    CHECK(res.converged);
    CHECK_FALSE(res.step_failure);
    const auto kkt = kkt_residual_mol(lp, lp.x_part(res.x), lp.lambda_part(res.x), res.y);
    CHECK(kkt.max() < 1e-6);
    const bool origin = res.x.norm() < 1e-6 && std::abs(res.y[0]) < 1e-6;
    const bool corner = std::abs(res.x[0] - 1) < 1e-6 && std::abs(res.x[1] - 1) < 1e-6 &&
                        std::abs(res.y[0]) < 1e-6;
    CHECK((origin || corner));
}

TEST_CASE("spg on example1 from x0 = 5 lands in the two-point stationary set") {
    const auto lp = lift(make_example1());
    const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
    const auto res = solve_spg(lp.mm, cfg, tight(1e-9), Vec{{5.0, 0.0, 0.0}}, Vec{{0.0}});
    REQUIRE_FALSE(res.step_failure);
    const double x = res.x[0], y = res.y[0];
    const bool true_point = std::abs(x - 10) < 1e-4 && std::abs(y - 10) < 1e-4;
    const bool spurious = std::abs(x - 1) < 1e-4 && std::abs(y - 1) < 1e-4;
    CHECK((true_point || spurious));
    const auto kkt = kkt_residual_mol(lp, lp.x_part(res.x), lp.lambda_part(res.x), res.y);
    CHECK(kkt.max() <= 1e-6);
    CHECK(feasibility_mcc(lp.base, lp.x_part(res.x), res.y) <= 1e-6);
}

TEST_CASE("spg matches the grid argmin of a quadratic envelope") {
    // Γ = xy − y²/2 + (αη/2)(x − y)² on [0.5, 1] × [−1, 1]: unique minimizer (0.5, 0.5).
    const auto mm = testing::minimax(testing::bilinear_quadratic(Mat::Identity(1, 1), Vec::Zero(1)),
                                     BoxSet::uniform(1, 0.5, 1), BoxSet::uniform(1, -1, 1));
    const auto cfg = EnvelopeConfig::theorem_default(mm);
    const auto res = solve_spg(mm, cfg, tight(), Vec{{0.9}}, Vec{{-0.8}});
    const TensorGrid g{{uniform_axis(0.5, 1, 51), uniform_axis(-1, 1, 201)}};
    const auto best = grid_min_gamma(mm, cfg, g, Execution::parallel);
    const Vec p = g.point(best.index);
    CHECK(std::abs(res.x[0] - p[0]) < 1e-4);
    CHECK(std::abs(res.y[0] - p[1]) < 1e-4);
    CHECK(res.fval <= best.value + 1e-8);
}

TEST_CASE("spg reports step failure when no trial point is acceptable") {
    // A gradient oracle pointing uphill makes every trial step an increase.
    auto wrong = testing::scalar_function([](double x, double y) { return x - 0.5 * y * y; },
                                          [](double, double) { return -1.0; },
                                          [](double, double y) { return -y; });
    const auto mm = testing::minimax(wrong, std::make_shared<WholeSpace>(1),
                                     std::make_shared<WholeSpace>(1));
    SolverConfig s = tight();
    s.max_backtracks = 50;
    const auto res = solve_spg(mm, EnvelopeConfig::theorem_default(mm), s, Vec{{0.0}}, Vec{{0.0}});
    CHECK(res.step_failure);
    CHECK_FALSE(res.converged);
}

TEST_CASE("spg certificate on a synthetic instance") {
    const auto cp = make_synthetic(10, 10, 1.0, 7);
    const auto lp = lift(cp);
    const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
    const auto st = default_start(cp);
    const auto res = solve_spg(lp.mm, cfg, tight(1e-7, 10000), lp.join(st.x, st.lambda), st.y);
    CHECK(res.converged);
    CHECK(res.stat <= 1e-7);
    const auto cert = certify(lp, cfg, res.x, res.y, res.grad_norm0);
    CHECK(cert.bound_ok);
    const double bound = eps_transfer_constant(lp.mm, cfg) * res.stat_unnormalized * 1.1;
    CHECK(cert.stat_mm_x <= bound);
    CHECK(cert.stat_mm_y <= bound);
    CHECK(cert.feas <= 1e-6);
}

TEST_CASE("solvers reject a nonconvex X") {
    auto mm = testing::minimax(testing::bilinear_quadratic(Mat::Identity(2, 2), Vec::Zero(2)),
                               std::make_shared<SphereSet>(Vec::Zero(2), 1.0),
                               std::make_shared<WholeSpace>(2));
    const EnvelopeConfig cfg(mm, 0.25, 8);
    SolverConfig s;
    s.step_x = s.step_y = StepSchedule{0.1, 0};
    const Vec x0{{1, 0}}, y0 = Vec::Zero(2);
    CHECK_THROWS_AS(solve_spg(mm, cfg, s, x0, y0), UnsupportedSet);
    CHECK_THROWS_AS(solve_subgda(mm, cfg, s, x0, y0), UnsupportedSet);
    CHECK_THROWS_AS(solve_gda_baseline(mm, cfg, s, x0, y0), UnsupportedSet);
}

TEST_CASE("subgda contracts y geometrically on -y^2/2") {
    const auto mm = testing::concave_scalar(0, std::make_shared<WholeSpace>(1));
    const auto cfg = EnvelopeConfig::theorem_default(mm);
    SolverConfig s = tight(0, 30);
    s.step_x = s.step_y = StepSchedule{0.1, 0};
    s.record_trace = true;
    const auto res = solve_subgda(mm, cfg, s, Vec{{0.0}}, Vec{{1.0}});
    // R = ∇_y f = −y for free Y, so y_k = 0.9^k.
    CHECK(res.y[0] == doctest::Approx(std::pow(0.9, 30)).epsilon(1e-12));
    CHECK(res.trace.size() == 31);
}

TEST_CASE("one subgda step on the scalar lifted instance") {
    const auto lp = lift(make_synthetic(SyntheticInstance::scalar()));
    const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
    SolverConfig s = tight(0, 1);
    s.step_x = s.step_y = StepSchedule{0.1, 0};
    const auto res = solve_subgda(lp.mm, cfg, s, Vec{{1.0, 0.0}}, Vec{{0.0}});
    // ∇_z L = (1 + y − λ, −(x + y − 1)) = (1, 0) at (1, 0, 0), so z⁺ = (0.9, 0);
    // then R = ∇_y L(z⁺, 0) = x − y − λ = 0.9 and y⁺ = 0.1 · 0.9.
    CHECK(res.iter == 1);
    CHECK(std::abs(res.x[0] - 0.9) < 1e-12);
    CHECK(std::abs(res.x[1] - 0.0) < 1e-12);
    CHECK(std::abs(res.y[0] - 0.09) < 1e-12);
}

TEST_CASE("subgda step resolution") {
    const auto lp = lift(make_synthetic(5, 5, 1.0, 1));
    const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
    SolverConfig s;
    const auto d = resolve_subgda_steps(lp.mm, cfg, s);
    CHECK(d.y.base == cfg.eta() / 2);
    CHECK(d.y.base / d.x.base == doctest::Approx(d.theta_required));

    s.step_y = StepSchedule{2 * cfg.eta(), 0};
    CHECK_THROWS_AS(resolve_subgda_steps(lp.mm, cfg, s), PreconditionViolation);

    s.theory_mode = true;
    s.step_y = StepSchedule{cfg.eta() / 2, 0};
    s.step_x = StepSchedule{cfg.eta() / 2, 0}; // ratio 1 is far below θ
    CHECK_THROWS_AS(resolve_subgda_steps(lp.mm, cfg, s), PreconditionViolation);
    s.step_x = StepSchedule{1e-4, 0.5};
    CHECK_THROWS_AS(resolve_subgda_steps(lp.mm, cfg, s), PreconditionViolation);
}

TEST_CASE("subgda converges on a synthetic instance") {
    for (std::uint64_t seed : {1ULL, 2ULL}) {
        const auto cp = make_synthetic(10, 10, 1.0, seed);
        const auto lp = lift(cp);
        const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
        const auto st = default_start(cp);
        const auto res =
            solve_subgda(lp.mm, cfg, tight(1e-5, 20000), lp.join(st.x, st.lambda), st.y);
        CHECK(res.converged);
        CHECK(res.stat <= 1e-5);
    }
}

TEST_CASE("gamma descent along subgda iterates") {
    const auto cp = make_synthetic(5, 5, 1.0, 2);
    const auto lp = lift(cp);
    const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
    const auto st = default_start(cp);
    SolverConfig s = tight(0, 2000);
    s.record_trace = true;
    s.theory_mode = true;
    const auto steps = resolve_subgda_steps(lp.mm, cfg, s);
    s.step_x = StepSchedule{1e-4, 0};
    s.step_y = StepSchedule{std::min(cfg.eta(), steps.theta_required * 1e-4), 0};
    const auto res = solve_subgda(lp.mm, cfg, s, lp.join(st.x, st.lambda), st.y);
    CHECK(gamma_descent_check(res.trace));

    SUBCASE("stationary start keeps the trace constant") {
        const auto lp1 = lift(make_synthetic(SyntheticInstance::scalar()));
        const auto c1 = EnvelopeConfig::theorem_default(lp1.mm);
        SolverConfig s1 = tight(-1, 50);
        s1.record_trace = true;
        const auto r1 = solve_subgda(lp1.mm, c1, s1, Vec::Zero(2), Vec::Zero(1));
        CHECK(r1.trace.size() == 51);
        CHECK(gamma_descent_check(r1.trace));
        CHECK(r1.trace.back().gamma == r1.trace.front().gamma);
    }
    SUBCASE("the check itself") {
        CHECK(gamma_descent_check({}));
        CHECK(gamma_descent_check({{1, 0, 0}, {1 + 1e-9, 0, 0}, {0.5, 0, 0}}));
        CHECK_FALSE(gamma_descent_check({{1, 0, 0}, {1.1, 0, 0}}));
    }
}

TEST_CASE("gda converges on the decoupled quadratic") {
    const auto dq = make_decoupled_quadratic();
    const EnvelopeConfig cfg(dq.problem, 0.5, 4);
    SolverConfig s = tight(1e-12, 10000);
    s.step_x = s.step_y = StepSchedule{0.3, 0};
    const auto res = solve_gda_baseline(dq.problem, cfg, s, Vec::Zero(2), Vec::Zero(2));
    CHECK(res.converged);
    CHECK((res.x - dq.x_star).norm() < 1e-10);
    CHECK((res.y - dq.y_star).norm() < 1e-10);
    CHECK(stationarity_residual(dq.problem, cfg, res.x, res.y) <= 1e-10);
}

TEST_CASE("gda needs explicit steps and flags divergence") {
    const auto dq = make_decoupled_quadratic();
    const EnvelopeConfig cfg(dq.problem, 0.5, 4);
    SolverConfig s;
    CHECK_THROWS_AS(solve_gda_baseline(dq.problem, cfg, s, Vec::Zero(2), Vec::Zero(2)), ConfigError);

    const auto lp = lift(make_synthetic(3, 3, 1.0, 1));
    const auto c3 = EnvelopeConfig::theorem_default(lp.mm);
    s.step_x = s.step_y = StepSchedule{50, 0};
    s.max_iter = 1000;
    const auto res = solve_gda_baseline(lp.mm, c3, s, Vec::Zero(6), Vec::Zero(3));
    CHECK(res.diverged);
    CHECK_FALSE(res.converged);
    CHECK(std::isinf(res.stat));
}

TEST_CASE("step grid") {
    const auto g = default_step_grid();
    REQUIRE(g.size() == 20);
    CHECK(g.front() == std::pair{1, 1});
    CHECK(g[1] == std::pair{3, 1});
    CHECK(g.back() == std::pair{9, 4});
    CHECK(grid_step({3, 2}) == doctest::Approx(0.03));
}

TEST_CASE("gda step selection keeps the smallest final stat") {
    const auto cp = make_synthetic(3, 3, 1.0, 5);
    const auto lp = lift(cp);
    const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
    const auto st = default_start(cp);
    const Vec z0 = lp.join(st.x, st.lambda);
    const std::vector<std::pair<int, int>> grid{{1, 1}, {5, 1}, {1, 2}, {9, 4}};
    SolverConfig s = tight(1e-7, 400);
    const auto sel = select_gda_steps(lp.mm, cfg, s, z0, st.y, grid, Execution::parallel);
    const auto serial = select_gda_steps(lp.mm, cfg, s, z0, st.y, grid, Execution::serial);
    CHECK(sel.index == serial.index);
    CHECK(sel.result.stat == serial.result.stat);

    // Independent scan over every pair.
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < grid.size() * grid.size(); ++i) {
        SolverConfig local = s;
        local.step_x = StepSchedule{grid_step(grid[i / grid.size()]), 0};
        local.step_y = StepSchedule{grid_step(grid[i % grid.size()]), 0};
        const double stat = solve_gda_baseline(lp.mm, cfg, local, z0, st.y).stat;
        if (stat < best) {
            best = stat;
            best_i = i;
        }
    }
    CHECK(sel.index == best_i);
    CHECK(sel.result.stat == best);
    CHECK(sel.step_x == grid_step(grid[best_i / grid.size()]));
    CHECK(sel.step_y == grid_step(grid[best_i % grid.size()]));
    CHECK_THROWS_AS(select_gda_steps(lp.mm, cfg, s, z0, st.y, {}), ConfigError);
}

TEST_CASE("tuned gda is slower than spg on a synthetic instance") {
    const auto cp = make_synthetic(10, 10, 1.0, 1);
    const auto lp = lift(cp);
    const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
    const auto st = default_start(cp);
    const Vec z0 = lp.join(st.x, st.lambda);
    const auto spg = solve_spg(lp.mm, cfg, tight(1e-7, 10000), z0, st.y);
    const auto gda = select_gda_steps(lp.mm, cfg, tight(1e-7, 10000), z0, st.y, default_step_grid());
    CHECK(gda.result.stat <= 1e-5);
    CHECK(gda.result.iter > spg.iter);
}

TEST_CASE("non-finite start") {
    const auto mm = testing::concave_scalar(0, std::make_shared<WholeSpace>(1));
    const auto cfg = EnvelopeConfig::theorem_default(mm);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_spg(mm, cfg, SolverConfig{}, Vec{{0.0}}, Vec{{nan}}), NonFiniteValue);
}
