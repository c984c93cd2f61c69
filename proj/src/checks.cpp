#include "pfbe/checks.hpp"

#include "pfbe/bench.hpp"
#include "pfbe/kernels.hpp"
#include "pfbe/problems.hpp"
#include "pfbe/sets.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace pfbe {

namespace {

// A check fails when its body exceeds `budget` seconds.
template <typename Fn>
CheckResult timed(int id, const char *name, double budget, Fn &&body) {
    CheckResult r;
    r.id = id;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception &e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > budget) {
        r.passed = false;
        r.detail += fmt::format("; over the {:.0f}s budget", budget);
    }
    return r;
}

double uniform(Xoshiro256pp &rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

Vec uniform_vec(Xoshiro256pp &rng, Eigen::Index n, double lo, double hi) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = uniform(rng, lo, hi);
    return v;
}

// Benchmark solves are shared by several checks.
const std::vector<RunRow> &cached_run(const RunConfig &cfg) {
    static std::mutex mu;
    static std::map<std::string, std::vector<RunRow>> cache;
    const std::string key = cfg.to_json();
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }
    auto rows = run(cfg);
    std::lock_guard lock(mu);
    return cache.emplace(key, std::move(rows)).first->second;
}

RunConfig synthetic_config(long n, double c, std::uint64_t seed, const std::string &solver) {
    RunConfig cfg;
    cfg.problem = "synthetic";
    cfg.n = cfg.p = n;
    cfg.c = c;
    cfg.seed = seed;
    cfg.solver = solver;
    return cfg;
}

// Random point of a lifted problem: x in its box, λ in [0, lam_hi]^m, y in
// [-y_hi, y_hi]^p (Y is the whole space for every lifted built-in).
struct LiftedSampler {
    const LiftedProblem &lp;
    double lam_hi, y_hi;

    std::pair<Vec, Vec> operator()(Xoshiro256pp &rng) const {
        auto box = std::dynamic_pointer_cast<const BoxSet>(lp.base.X);
        Vec x(lp.n());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x[i] = uniform(rng, box->lo()[i], box->hi()[i]);
        return {lp.join(x, uniform_vec(rng, lp.m(), 0.0, lam_hi)),
                uniform_vec(rng, lp.p(), -y_hi, y_hi)};
    }
};

} // namespace

// 1 ---------------------------------------------------------------------------

CheckResult check_example1_fidelity() {
    return timed(1, "example1_fidelity", 5, [](CheckResult &r) {
        const auto cp = make_example1();
        const auto lp = lift(cp);
        const double kkt = kkt_residual_mol(lp, Vec{{1.0}}, Vec{{2.0 / 3, 1.0 / 3}}, Vec{{1.0}}).max();

        std::vector<Vec> xs;
        for (double x : uniform_axis(1.0, 10.0, 400))
            xs.push_back(Vec::Constant(1, x));
        TensorGrid yg{{uniform_axis(-1.0, 11.0, 400)}};
        const auto rows = brute_force_value_function(cp, xs, yg);

        double worst_ratio = 0, worst_err = 0;
        bool feasible = true;
        for (const auto &row : rows) {
            const double exact = -0.5 * row.x[0] * row.x[0];
            const double err = std::abs(row.phi - exact);
            feasible = feasible && row.feasible;
            worst_err = std::max(worst_err, err);
            worst_ratio = std::max(worst_ratio, err / row.resolution);
        }
        const double phi10 = rows.back().phi;
        r.passed = kkt <= 1e-10 && feasible && worst_ratio <= 2.0 &&
                   std::abs(phi10 + 50) <= 2 * rows.back().resolution;
        r.detail = fmt::format("kkt at (1,2/3,1/3,1) = {:.1e}; max |Phi - (-x^2/2)| = {:.2e} "
                               "(<= {:.2f} x resolution); Phi(10) = {:.4f}",
                               kkt, worst_err, worst_ratio, phi10);
    });
}

// 2 ---------------------------------------------------------------------------

namespace {

struct EquivTally {
    int points = 0, stationary = 0, mismatches = 0;
    double max_stat_gamma = 0, max_stat_mm = 0; // over stationary samples
};

void classify(EquivTally &t, bool analytic, double gam, double mm) {
    ++t.points;
    if (analytic) {
        ++t.stationary;
        t.max_stat_gamma = std::max(t.max_stat_gamma, gam);
        t.max_stat_mm = std::max(t.max_stat_mm, mm);
    }
    const bool gam_zero = gam <= 1e-10, mm_zero = mm <= 1e-10;
    bool ok = (!gam_zero || mm <= 1e-9) && (!mm_zero || gam <= 1e-9);
    ok = ok && (analytic ? (gam_zero && mm <= 1e-9) : (!gam_zero && !mm_zero));
    if (!ok)
        ++t.mismatches;
}

} // namespace

CheckResult check_exact_equivalence() {
    return timed(2, "exact_equivalence", 60, [](CheckResult &r) {
        Xoshiro256pp rng(20240601);

        // Decoupled quadratic: x* = (−0.5, 1), y* = (0.3, 1).
        EquivTally dq;
        {
            const auto inst = make_decoupled_quadratic();
            const auto &pr = inst.problem;
            const auto cfg = EnvelopeConfig::theorem_default(pr);
            for (int i = 0; i < 1000; ++i) {
                Vec x = uniform_vec(rng, 2, -1, 1), y = uniform_vec(rng, 2, -1, 1);
                if (i % 4 == 0 || i % 4 == 1)
                    x = inst.x_star;
                if (i % 4 == 0 || i % 4 == 2)
                    y = inst.y_star;
                const auto mm = mm_residual(pr, x, y);
                classify(dq, i % 4 == 0, stationarity_residual(pr, cfg, x, y),
                         std::max(mm.eps_x, mm.eps_y));
            }
        }

        // Scalar synthetic instance, lifted: stationary set {(0,0,0), (1,1,0)}.
        EquivTally sc;
        {
            const auto lp = lift(make_synthetic(SyntheticInstance::scalar()));
            const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
            const Vec pts[2][2] = {{Vec{{0.0, 0.0}}, Vec{{0.0}}}, {Vec{{1.0, 1.0}}, Vec{{0.0}}}};
            for (int i = 0; i < 1000; ++i) {
                Vec z{{uniform(rng, 0, 1), uniform(rng, 0, 2)}};
                Vec y{{uniform(rng, -2, 2)}};
                const int kind = i % 4;
                if (kind == 0) {
                    z = pts[(i / 4) % 2][0];
                    y = pts[(i / 4) % 2][1];
                } else if (kind == 1) {
                    z = pts[(i / 4) % 2][0];
                } else if (kind == 2) {
                    y = Vec{{z[0] - z[1]}}; // inner maximizer, z random
                }
                const auto mm = mm_residual(lp.mm, z, y);
                classify(sc, kind == 0, stationarity_residual(lp.mm, cfg, z, y),
                         std::max(mm.eps_x, mm.eps_y));
            }
        }

        r.passed = dq.mismatches == 0 && sc.mismatches == 0;
        r.detail = fmt::format(
            "decoupled: {} pts ({} stationary), {} mismatches, max stationary residuals "
            "{:.1e}/{:.1e}; scalar lifted: {} pts ({} stationary), {} mismatches, "
            "{:.1e}/{:.1e}",
            dq.points, dq.stationary, dq.mismatches, dq.max_stat_gamma, dq.max_stat_mm,
            sc.points, sc.stationary, sc.mismatches, sc.max_stat_gamma, sc.max_stat_mm);
    });
}

// 3 ---------------------------------------------------------------------------

CheckResult check_eps_transfer() {
    return timed(3, "eps_transfer_bound", 1800, [](CheckResult &r) {
        int solves = 0, violations = 0;
        double worst = 0; // max eps / bound
        for (long n : {1L, 10L, 50L})
            for (double c : {0.5, 1.0, 2.0})
                for (std::uint64_t seed : {1ULL, 2ULL, 3ULL})
                    for (const char *solver : {"spg", "subgda", "gda"}) {
                        for (const auto &row : cached_run(synthetic_config(n, c, seed, solver))) {
                            ++solves;
                            const auto &ct = row.cert;
                            if (!ct.bound_ok)
                                ++violations;
                            if (ct.transfer_bound > 0)
                                worst = std::max(worst, std::max(ct.stat_mm_x, ct.stat_mm_y) /
                                                            ct.transfer_bound);
                        }
                    }
        r.passed = violations == 0 && solves == 81;
        r.detail = fmt::format("{} solves, {} violations, max eps/bound = {:.3f}", solves,
                               violations, worst);
    });
}

// 4 ---------------------------------------------------------------------------

CheckResult check_sandwich() {
    return timed(4, "sandwich_inequalities", 30, [](CheckResult &r) {
        struct Case {
            std::string name;
            MinimaxProblem mm;
            std::function<std::pair<Vec, Vec>(Xoshiro256pp &)> sample;
        };
        std::vector<Case> cases;
        std::vector<std::shared_ptr<LiftedProblem>> keep;
        auto add_lifted = [&](std::string name, const CoupledProblem &cp, double lam_hi,
                              double y_hi) {
            keep.push_back(std::make_shared<LiftedProblem>(lift(cp)));
            LiftedSampler s{*keep.back(), lam_hi, y_hi};
            cases.push_back({std::move(name), keep.back()->mm, s});
        };
        add_lifted("scalar", make_synthetic(SyntheticInstance::scalar()), 2, 3);
        for (std::uint64_t seed : {1ULL, 2ULL}) {
            add_lifted(fmt::format("synthetic5_s{}", seed), make_synthetic(5, 5, 1.0, seed), 2, 3);
            add_lifted(fmt::format("synthetic10_s{}", seed), make_synthetic(10, 10, 0.5, seed), 2,
                       3);
        }
        add_lifted("example1", make_example1(), 2, 25);
        {
            const auto dq = make_decoupled_quadratic();
            cases.push_back({"decoupled", dq.problem, [](Xoshiro256pp &rng) {
                                 return std::pair{uniform_vec(rng, 2, -1, 1),
                                                  uniform_vec(rng, 2, -1, 1)};
                             }});
        }

        Xoshiro256pp rng(777);
        const int per_case = 10000 / static_cast<int>(cases.size()) + 1;
        int points = 0, failures = 0;
        double worst = std::numeric_limits<double>::infinity();
        for (const auto &cs : cases) {
            const double L = cs.mm.lipschitz();
            const double eta = 0.5 / L; // strictly below 1/L
            const EnvelopeConfig cfg(cs.mm, eta, EnvelopeConfig::min_alpha(eta, cs.mm.mu()));
            for (int i = 0; i < per_case; ++i) {
                const auto [x, y] = cs.sample(rng);
                const auto e = evaluate(cs.mm, cfg, x, y, false);
                const double r2 = e.R.squaredNorm();
                const double lower = e.psi - (e.f - cs.mm.r2->value(y) + 0.5 * eta * r2);
                const double upper = cs.mm.f->value(x, e.T) - cs.mm.r2->value(e.T) -
                                     (e.psi + 0.5 * eta * (1 - eta * L) * r2);
                worst = std::min({worst, lower, upper});
                if (lower < -1e-10 || upper < -1e-10)
                    ++failures;
                ++points;
            }
        }
        r.passed = failures == 0 && points >= 10000;
        r.detail = fmt::format("{} points over {} instances, {} failures, min slack {:.2e}",
                               points, cases.size(), failures, worst);
    });
}

// 5 ---------------------------------------------------------------------------

CheckResult check_lower_bound_identity() {
    return timed(5, "gamma_lower_bound", 60, [](CheckResult &r) {
        const auto lp = lift(make_synthetic(SyntheticInstance::scalar()));
        const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
        const auto xs = uniform_axis(0.0, 1.0, 400);
        const auto ls = uniform_axis(0.0, 2.0, 400);
        const auto ys = uniform_axis(-3.0, 3.0, 400);

        const auto gmin = grid_min_gamma(lp.mm, cfg, TensorGrid{{xs, ls, ys}}, Execution::parallel);

        // F(z) = max_y L(z, y) on the same y axis.
        const auto &f = *lp.mm.f;
        auto F = [&](const Vec &z) {
            double best = -std::numeric_limits<double>::infinity();
            Vec y(1);
            for (double yv : ys) {
                y[0] = yv;
                best = std::max(best, f.value(z, y));
            }
            return best;
        };
        const auto fmin = grid_argmin(TensorGrid{{xs, ls}}, F, Execution::parallel);

        const double gap = std::abs(gmin.value - fmin.value);
        r.passed = gap <= 1e-3;
        r.detail = fmt::format("min Gamma = {:.6f}, min F = {:.6f}, gap {:.2e} (400^3 grid)",
                               gmin.value, fmin.value, gap);
    });
}

// 6 ---------------------------------------------------------------------------

CheckResult check_protocol_reproduction() {
    return timed(6, "protocol_reproduction", 1800, [](CheckResult &r) {
        int spg_ok = 0, ordered = 0, total = 0;
        long spg_max_iter = 0;
        double spg_max_time = 0;
        std::ostringstream ratios;
        for (long n : {10L, 20L, 50L})
            for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
                const auto &spg = cached_run(synthetic_config(n, 1.0, seed, "spg")).front();
                const auto &gda = cached_run(synthetic_config(n, 1.0, seed, "gda")).front();
                const auto &s = spg.result;
                ++total;
                if (s.converged && s.stat <= 1e-7 && s.feas <= 1e-6 && s.iter < 5000 &&
                    s.wall_time < 30)
                    ++spg_ok;
                spg_max_iter = std::max(spg_max_iter, s.iter);
                spg_max_time = std::max(spg_max_time, s.wall_time);
                if (gda.result.iter >= 2 * s.iter)
                    ++ordered;
                ratios << (total > 1 ? " " : "")
                       << fmt::format("{:.1f}", double(gda.result.iter) / std::max(1L, s.iter));
            }
        r.passed = spg_ok == total && ordered >= 7;
        r.detail = fmt::format("SPG ok on {}/{} (max iter {}, max {:.3f}s); GDA >= 2x SPG iters "
                               "on {}/{} (ratios {})",
                               spg_ok, total, spg_max_iter, spg_max_time, ordered, total,
                               ratios.str());
    });
}

// 7 ---------------------------------------------------------------------------

namespace {

// Fourth-order central difference of Ξ along coordinate i of (x, y).
double fd_xi(const MinimaxProblem &pr, const EnvelopeConfig &cfg, const Vec &x, const Vec &y,
             Eigen::Index i, double h) {
    const Eigen::Index n = x.size();
    auto at = [&](double t) {
        Vec xx = x, yy = y;
        if (i < n)
            xx[i] += t;
        else
            yy[i - n] += t;
        return evaluate(pr, cfg, xx, yy, false).xi;
    };
    return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

struct GradTally {
    int points = 0, skipped = 0, failures = 0;
    double worst = 0;
};

void grad_family(GradTally &t, const MinimaxProblem &pr, const EnvelopeConfig &cfg,
                 const std::function<std::pair<Vec, Vec>(Xoshiro256pp &)> &sample,
                 Xoshiro256pp &rng) {
    for (int attempt = 0; t.points < 100; ++attempt) {
        if (attempt == 100000) {
            ++t.failures; // never found enough smooth points
            break;
        }
        const auto [x, y] = sample(rng);
        if (near_prox_kink(pr, cfg, x, y, 1e-2)) {
            ++t.skipped;
            continue;
        }
        const auto e = evaluate(pr, cfg, x, y);
        Vec g(x.size() + y.size());
        g << e.grad_x, e.grad_y;
        Vec fd(g.size());
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const double v = i < x.size() ? x[i] : y[i - x.size()];
            fd[i] = fd_xi(pr, cfg, x, y, i, 1e-3 * (1 + std::abs(v)));
        }
        const double rel = (g - fd).norm() / std::max(1.0, g.norm());
        t.worst = std::max(t.worst, rel);
        if (rel > 1e-5)
            ++t.failures;
        ++t.points;
    }
}

} // namespace

CheckResult check_gradient_correctness() {
    return timed(7, "gradient_correctness", 60, [](CheckResult &r) {
        Xoshiro256pp rng(4242);
        std::vector<std::pair<std::string, GradTally>> out;

        for (std::uint64_t seed : {3ULL, 11ULL}) {
            const auto lp = lift(make_synthetic(3, 4, 0.8, seed));
            for (const auto &cfg :
                 {EnvelopeConfig::theorem_default(lp.mm), EnvelopeConfig(lp.mm, 1.0, 100.0)}) {
                GradTally t;
                grad_family(t, lp.mm, cfg, LiftedSampler{lp, 2, 3}, rng);
                out.emplace_back(fmt::format("synthetic s{} a={:g}", seed, cfg.alpha()), t);
            }
        }
        {
            const auto lp = lift(make_example1());
            GradTally t;
            grad_family(t, lp.mm, EnvelopeConfig::theorem_default(lp.mm),
                        LiftedSampler{lp, 2, 25}, rng);
            out.emplace_back("example1", t);
        }
        {
            const auto dq = make_decoupled_quadratic();
            GradTally t;
            grad_family(t, dq.problem, EnvelopeConfig(dq.problem, 0.5, 4.0),
                        [](Xoshiro256pp &g) {
                            return std::pair{uniform_vec(g, 2, -1, 1),
                                             uniform_vec(g, 2, -0.95, 0.95)};
                        },
                        rng);
            out.emplace_back("decoupled_box", t);
        }

        int failures = 0;
        double worst = 0;
        std::ostringstream parts;
        for (const auto &[name, t] : out) {
            failures += t.failures;
            worst = std::max(worst, t.worst);
            parts << fmt::format("; {}: {} pts, {} kink skips", name, t.points, t.skipped);
        }
        r.passed = failures == 0;
        r.detail = fmt::format("{} failures, max rel err {:.1e}{}", failures, worst, parts.str());
    });
}

// 8 ---------------------------------------------------------------------------

CheckResult check_subgda_descent() {
    return timed(8, "subgda_descent", 300, [](CheckResult &r) {
        int runs = 0, ok = 0;
        double worst = -std::numeric_limits<double>::infinity(); // largest step increase / slack
        for (std::uint64_t seed : {1ULL, 2ULL, 3ULL})
            for (bool small_x : {false, true}) {
                const auto cp = make_synthetic(5, 5, 1.0, seed);
                const auto lp = lift(cp);
                const auto cfg = EnvelopeConfig::theorem_default(lp.mm);
                SolverConfig s;
                s.max_iter = 10000;
                s.gtol = 0;
                s.record_trace = true;
                s.theory_mode = true;
                if (small_x) {
                    const auto steps = resolve_subgda_steps(lp.mm, cfg, s);
                    s.step_x = StepSchedule{1e-4, 0};
                    s.step_y = StepSchedule{std::min(cfg.eta(), steps.theta_required * 1e-4), 0};
                }
                const auto st = default_start(cp);
                const auto res = solve_subgda(lp.mm, cfg, s, lp.join(st.x, st.lambda), st.y);
                ++runs;
                if (gamma_descent_check(res.trace) && res.trace.size() == 10001)
                    ++ok;
                const double slack = 1e-8 * (1 + std::abs(res.trace.front().gamma));
                for (std::size_t k = 1; k < res.trace.size(); ++k)
                    worst = std::max(worst, (res.trace[k].gamma - res.trace[k - 1].gamma) / slack);
            }
        r.passed = ok == runs;
        r.detail = fmt::format("{}/{} runs nonincreasing over 1e4 iterations; max step change "
                               "{:.2e} x slack",
                               ok, runs, worst);
    });
}

// 9 ---------------------------------------------------------------------------

namespace {

std::string csv_without_time(const std::vector<RunRow> &rows) {
    std::ostringstream out;
    write_csv(out, rows);
    std::istringstream in(out.str());
    std::string line, kept;
    while (std::getline(in, line))
        kept += line.substr(0, line.rfind(',')) + '\n';
    return kept;
}

} // namespace

CheckResult check_sweep_determinism() {
    return timed(9, "sweep_determinism", 300, [](CheckResult &r) {
        std::vector<RunConfig> configs;
        for (long n : {1L, 5L})
            for (double c : {0.5, 1.0})
                for (std::uint64_t seed : {2ULL, 1ULL})
                    for (const char *solver : {"gda", "subgda", "spg"}) {
                        auto cfg = synthetic_config(n, c, seed, solver);
                        cfg.gda_step_grid = {{1, 1}, {5, 1}, {1, 2}, {5, 2}};
                        configs.push_back(cfg);
                    }
        const auto a = csv_without_time(sweep(configs, Execution::parallel));
        const auto b = csv_without_time(sweep(configs, Execution::serial));
        std::reverse(configs.begin(), configs.end());
        const auto c = csv_without_time(sweep(configs, Execution::parallel));
        const auto lines = std::count(a.begin(), a.end(), '\n');
        r.passed = a == b && a == c && lines == 1 + 24;
        r.detail = fmt::format("3 sweeps of {} configs ({} CSV lines): {}", configs.size(), lines,
                               a == b && a == c ? "byte-identical without time_s" : "DIFFER");
    });
}

// -----------------------------------------------------------------------------

std::vector<CheckResult> run_all_checks(const std::function<void(const CheckResult &)> &on_result) {
    std::vector<CheckResult (*)()> checks = {
        check_example1_fidelity, check_exact_equivalence,     check_eps_transfer,
        check_sandwich,          check_lower_bound_identity,  check_protocol_reproduction,
        check_gradient_correctness, check_subgda_descent,     check_sweep_determinism};
    std::vector<CheckResult> out;
    for (auto check : checks) {
        out.push_back(check());
        if (on_result)
            on_result(out.back());
    }
    return out;
}

std::string format_check(const CheckResult &r) {
    return fmt::format("[{}] {} {} ({:.2f}s): {}", r.passed ? "PASS" : "FAIL", r.id, r.name,
                       r.seconds, r.detail);
}

} // namespace pfbe
