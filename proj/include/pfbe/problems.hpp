#pragma once

#include "pfbe/core.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace pfbe {

/// splitmix64 step; used to expand a 64-bit seed into xoshiro state.
std::uint64_t splitmix64(std::uint64_t &state);

/// xoshiro256++ generator seeded through splitmix64.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed);
    std::uint64_t next();
    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform();

  private:
    std::array<std::uint64_t, 4> s_;
};

/// Standard normal stream: xoshiro256++ uniforms through Box-Muller, both
/// outputs of each pair used in order (cos branch first).
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}
    double operator()();

  private:
    Xoshiro256pp rng_;
    std::optional<double> cached_;
};

double rng_standard_normal(NormalStream &state);

/// Data of the synthetic coupled allocation problem
///   min_{0≤x≤1} max_{y, x+y≤c} ⟨b, x⟩ + ⟨x, By⟩ − ½‖y‖².
/// B is drawn row-major first, then b, which is normalized to unit length.
struct SyntheticInstance {
    Eigen::Index n = 0, p = 0;
    double c = 1.0;
    std::uint64_t seed = 0;
    Mat B;
    Vec b;

    static SyntheticInstance generate(Eigen::Index n, Eigen::Index p, double c,
                                      std::uint64_t seed);
    /// n = p = 1 with B = [[1]], b = [1]: the hand-checkable member.
    static SyntheticInstance scalar(double c = 1.0);
    /// Number of coupled coordinates, min(n, p).
    Eigen::Index k() const { return std::min(n, p); }
};

/// Spectral norm of the Hessian of the lifted synthetic Lagrangian over
/// (x, λ, y), by power iteration from a deterministic start.
double synthetic_lifted_lipschitz(const Mat &B);

CoupledProblem make_synthetic(const SyntheticInstance &inst);
CoupledProblem make_synthetic(Eigen::Index n, Eigen::Index p, double c, std::uint64_t seed);

/// The scalar counterexample on [1, 10] × R with c(x, y) = (y − x, y − x⁴) ≤ 0
/// and g = −½(y − 2x)². The lifted Lipschitz constant is the Hessian norm on
/// the λ = 0 slice at x = 10, a local value only (the x⁴ term has no global one).
CoupledProblem make_example1();

/// min_{x∈[-1,1]²} max_{y∈[-1,1]²} ½Σ q_i x_i² + ⟨d, x⟩ − ½‖y − e‖² with
/// q = (1, 2), d = (0.5, −3), e = (0.3, 2). Decoupled, so its only
/// first-order minimax point is x* = (−0.5, 1), y* = (0.3, 1).
struct DecoupledQuadratic {
    MinimaxProblem problem;
    Vec x_star, y_star;
};
DecoupledQuadratic make_decoupled_quadratic();

/// Start point for built-in problems: x at the center of a bounded box (or
/// its projection of 0), λ = 0, y = 0 projected onto Y.
struct StartPoint {
    Vec x, lambda, y;
};
StartPoint default_start(const CoupledProblem &problem);

} // namespace pfbe
