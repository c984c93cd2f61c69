#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

namespace pfbe {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecRef = Eigen::Ref<const Vec>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFiniteValue : Error {
    using Error::Error;
};
struct ZeroDirection : Error {
    using Error::Error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct IncompleteOracle : Error {
    using Error::Error;
};
struct UnsupportedSet : Error {
    using Error::Error;
};
struct PreconditionViolation : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

void check_dim(Eigen::Index got, Eigen::Index want, const char *what);

// ---------------------------------------------------------------------------
// Smooth coupling f(x, y)
// ---------------------------------------------------------------------------

/// Value, gradient and Hessian-vector-product access to a smooth function
/// f(x, y) that is strongly concave in y.
///
/// Implementations must be pure: every method is const and thread-safe, so
/// a single instance can back any number of concurrent solves.
class FunctionOracle {
  public:
    virtual ~FunctionOracle() = default;

    virtual Eigen::Index dim_x() const = 0;
    virtual Eigen::Index dim_y() const = 0;

    virtual double value(const Vec &x, const Vec &y) const = 0;
    virtual Vec grad_x(const Vec &x, const Vec &y) const = 0;
    virtual Vec grad_y(const Vec &x, const Vec &y) const = 0;

    /// Exact Hessian-vector products. When provides_hvp() is false these
    /// throw IncompleteOracle and callers fall back to finite differences.
    virtual bool provides_hvp() const { return false; }
    /// ∇²_{xy} f(x, y) v, with v in R^p and the result in R^n.
    virtual Vec hvp_xy(const Vec &x, const Vec &y, const Vec &v) const;
    /// ∇²_{yy} f(x, y) v.
    virtual Vec hvp_yy(const Vec &x, const Vec &y, const Vec &v) const;

    /// Lipschitz constant of ∇f over the whole space.
    virtual double lipschitz_grad() const = 0;
    /// Strong concavity modulus of y ↦ f(x, y).
    virtual double strong_concavity() const = 0;
};

/// FunctionOracle assembled from closures; absent HVP closures leave
/// provides_hvp() false.
class CallbackFunction final : public FunctionOracle {
  public:
    using Scalar2 = std::function<double(const Vec &, const Vec &)>;
    using Vector2 = std::function<Vec(const Vec &, const Vec &)>;
    using Vector3 = std::function<Vec(const Vec &, const Vec &, const Vec &)>;

    struct Parts {
        Eigen::Index n = 0, p = 0;
        Scalar2 value;
        Vector2 grad_x, grad_y;
        Vector3 hvp_xy, hvp_yy;
        double lipschitz = 1.0;
        double mu = 1.0;
    };

    explicit CallbackFunction(Parts parts);

    Eigen::Index dim_x() const override { return parts_.n; }
    Eigen::Index dim_y() const override { return parts_.p; }
    double value(const Vec &x, const Vec &y) const override;
    Vec grad_x(const Vec &x, const Vec &y) const override;
    Vec grad_y(const Vec &x, const Vec &y) const override;
    bool provides_hvp() const override;
    Vec hvp_xy(const Vec &x, const Vec &y, const Vec &v) const override;
    Vec hvp_yy(const Vec &x, const Vec &y, const Vec &v) const override;
    double lipschitz_grad() const override { return parts_.lipschitz; }
    double strong_concavity() const override { return parts_.mu; }

  private:
    Parts parts_;
};

// ---------------------------------------------------------------------------
// Coupled constraint c(x, y) ∈ K
// ---------------------------------------------------------------------------

/// Constraint map c : R^n × R^p → R^m with the Jacobian products needed
/// to lift the problem. Transposed products take a multiplier λ ∈ R^m.
class ConstraintOracle {
  public:
    virtual ~ConstraintOracle() = default;

    virtual Eigen::Index dim_x() const = 0;
    virtual Eigen::Index dim_y() const = 0;
    virtual Eigen::Index dim_c() const = 0;

    virtual Vec value(const Vec &x, const Vec &y) const = 0;
    /// ∇_x c(x, y) λ  (n-vector).
    virtual Vec jvp_x(const Vec &x, const Vec &y, const Vec &lambda) const = 0;
    /// ∇_y c(x, y) λ  (p-vector).
    virtual Vec jvp_y(const Vec &x, const Vec &y, const Vec &lambda) const = 0;
    /// Directional derivative of c along v in y: ∇_y c(x, y)ᵀ v  (m-vector).
    virtual Vec dir_y(const Vec &x, const Vec &y, const Vec &v) const = 0;

    /// Second-order products of y ↦ ⟨λ, c(x, y)⟩. Defaults throw
    /// IncompleteOracle; see provides_hvp().
    virtual bool provides_hvp() const { return false; }
    virtual Vec hvp_xy(const Vec &x, const Vec &y, const Vec &lambda, const Vec &v) const;
    virtual Vec hvp_yy(const Vec &x, const Vec &y, const Vec &lambda, const Vec &v) const;
};

/// ConstraintOracle assembled from closures. Missing first-order products
/// are detected by lift(), which throws IncompleteOracle.
class CallbackConstraint final : public ConstraintOracle {
  public:
    using Vector2 = std::function<Vec(const Vec &, const Vec &)>;
    using Vector3 = std::function<Vec(const Vec &, const Vec &, const Vec &)>;
    using Vector4 = std::function<Vec(const Vec &, const Vec &, const Vec &, const Vec &)>;

    struct Parts {
        Eigen::Index n = 0, p = 0, m = 0;
        Vector2 value;
        Vector3 jvp_x, jvp_y, dir_y;
        Vector4 hvp_xy, hvp_yy;
    };

    explicit CallbackConstraint(Parts parts);

    bool complete() const;

    Eigen::Index dim_x() const override { return parts_.n; }
    Eigen::Index dim_y() const override { return parts_.p; }
    Eigen::Index dim_c() const override { return parts_.m; }
    Vec value(const Vec &x, const Vec &y) const override;
    Vec jvp_x(const Vec &x, const Vec &y, const Vec &lambda) const override;
    Vec jvp_y(const Vec &x, const Vec &y, const Vec &lambda) const override;
    Vec dir_y(const Vec &x, const Vec &y, const Vec &v) const override;
    bool provides_hvp() const override;
    Vec hvp_xy(const Vec &x, const Vec &y, const Vec &lambda, const Vec &v) const override;
    Vec hvp_yy(const Vec &x, const Vec &y, const Vec &lambda, const Vec &v) const override;

  private:
    Parts parts_;
};

// ---------------------------------------------------------------------------
// Sets, cones and proximal terms
// ---------------------------------------------------------------------------

/// Closed set with Euclidean projection.
class ProjectableSet {
  public:
    virtual ~ProjectableSet() = default;
    virtual Eigen::Index dim() const = 0;
    virtual Vec project(const Vec &z) const = 0;
    virtual bool contains(const Vec &z, double tol) const = 0;
    virtual bool is_convex() const { return true; }
    virtual bool is_whole_space() const { return false; }
};

/// Closed convex cone K. polar() returns K° = {v : ⟨v, k⟩ ≤ 0 ∀k ∈ K}.
class ProjectableCone : public ProjectableSet {
  public:
    virtual std::shared_ptr<const ProjectableCone> polar() const = 0;
};

/// Convex (or locally Lipschitz) regularizer with a scaled proximal map
///   prox(z, t) = argmin_v value(v) + ‖v − z‖² / (2t).
class ProxRegularizer {
  public:
    virtual ~ProxRegularizer() = default;
    virtual double value(const Vec &z) const = 0;
    virtual Vec prox(const Vec &z, double step) const = 0;
    virtual bool is_zero() const { return false; }
    virtual bool is_convex() const { return true; }
};

/// Exact proximal map of (step·r + indicator of a set) supplied by the user
/// when neither piece is trivial.
using FusedProx = std::function<Vec(const Vec &z, double step)>;

/// prox of (step·reg + indicator(set)) at z.
///
/// Supported exactly when reg is identically zero (projection) or the set is
/// the whole space (plain prox); any other pairing needs `fused`, otherwise
/// IncompleteOracle is thrown.
Vec composite_prox(const ProxRegularizer &reg, const ProjectableSet &set,
                   const FusedProx &fused, const Vec &z, double step);

// ---------------------------------------------------------------------------
// Problem containers
// ---------------------------------------------------------------------------

/// min_{x∈X} max_{y∈Y} f(x, y) + r1(x) − r2(y).
struct MinimaxProblem {
    std::shared_ptr<const FunctionOracle> f;
    std::shared_ptr<const ProxRegularizer> r1, r2;
    std::shared_ptr<const ProjectableSet> X, Y;
    /// Optional fused prox for r1 + ind_X and r2 + ind_Y respectively.
    FusedProx prox_x, prox_y;

    Eigen::Index n() const { return f->dim_x(); }
    Eigen::Index p() const { return f->dim_y(); }
    double mu() const { return f->strong_concavity(); }
    double lipschitz() const { return f->lipschitz_grad(); }

    /// Throws DimensionError / UnsupportedSet when the pieces do not fit:
    /// dimensions must agree and r2, Y must be convex.
    void validate() const;

    Vec prox_x_step(const Vec &z, double step) const;
    Vec prox_y_step(const Vec &z, double step) const;
};

/// min_{x∈X} max_{y∈Y, c(x,y)∈K} g(x, y) + r1(x).
struct CoupledProblem {
    std::shared_ptr<const FunctionOracle> g;
    std::shared_ptr<const ProxRegularizer> r1;
    std::shared_ptr<const ConstraintOracle> c;
    std::shared_ptr<const ProjectableSet> X, Y;
    std::shared_ptr<const ProjectableCone> K;
    FusedProx prox_x;

    /// Lipschitz constant of the lifted Lagrangian gradient; 0 means unknown
    /// and lift() falls back to the base constant of g.
    double lifted_lipschitz = 0.0;

    Eigen::Index n() const { return g->dim_x(); }
    Eigen::Index p() const { return g->dim_y(); }
    Eigen::Index m() const { return c->dim_c(); }
    double mu() const { return g->strong_concavity(); }

    void validate() const;
};

// ---------------------------------------------------------------------------
// Finite-difference verification oracles
// ---------------------------------------------------------------------------

struct GradPair {
    Vec gx, gy;
};

/// Default central-difference step for gradients: √ε·(1 + ‖y‖).
double fd_grad_step(const Vec &x, const Vec &y);
/// Default step for Hessian-vector products: ∛ε·(1 + ‖y‖).
double fd_hvp_step(const Vec &y);

/// Central-difference gradient of oracle.value at (x, y) with step h.
GradPair fd_gradient(const FunctionOracle &oracle, const Vec &x, const Vec &y, double h);

/// (grad_y(x, y + h v̂) − grad_y(x, y − h v̂)) / (2h) · ‖v‖.
Vec fd_hvp_yy(const FunctionOracle &oracle, const Vec &x, const Vec &y, const Vec &v, double h);
/// Same construction for the cross block, differencing grad_x along y.
Vec fd_hvp_xy(const FunctionOracle &oracle, const Vec &x, const Vec &y, const Vec &v, double h);

/// Exact HVP when available, otherwise FD; `used_fd` is set when the
/// fallback ran.
Vec hvp_yy(const FunctionOracle &oracle, const Vec &x, const Vec &y, const Vec &v,
           bool *used_fd = nullptr);
Vec hvp_xy(const FunctionOracle &oracle, const Vec &x, const Vec &y, const Vec &v,
           bool *used_fd = nullptr);

} // namespace pfbe
