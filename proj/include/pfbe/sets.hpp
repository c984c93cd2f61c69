#pragma once

#include "pfbe/core.hpp"

#include <memory>
#include <vector>

namespace pfbe {

/// Componentwise bounds lo ≤ z ≤ hi; ±∞ entries encode free coordinates.
class BoxSet final : public ProjectableSet {
  public:
    BoxSet(Vec lo, Vec hi);
    static std::shared_ptr<const BoxSet> uniform(Eigen::Index n, double lo, double hi);

    Eigen::Index dim() const override { return lo_.size(); }
    Vec project(const Vec &z) const override;
    bool contains(const Vec &z, double tol) const override;
    bool is_whole_space() const override;

    const Vec &lo() const { return lo_; }
    const Vec &hi() const { return hi_; }

  private:
    Vec lo_, hi_;
};

class WholeSpace final : public ProjectableCone {
  public:
    explicit WholeSpace(Eigen::Index n) : n_(n) {}
    Eigen::Index dim() const override { return n_; }
    Vec project(const Vec &z) const override;
    bool contains(const Vec &z, double tol) const override;
    bool is_whole_space() const override { return true; }
    std::shared_ptr<const ProjectableCone> polar() const override;

  private:
    Eigen::Index n_;
};

/// The cone {0}; polar of the whole space. Encodes equality constraints.
class ZeroCone final : public ProjectableCone {
  public:
    explicit ZeroCone(Eigen::Index n) : n_(n) {}
    Eigen::Index dim() const override { return n_; }
    Vec project(const Vec &z) const override;
    bool contains(const Vec &z, double tol) const override;
    std::shared_ptr<const ProjectableCone> polar() const override;

  private:
    Eigen::Index n_;
};

enum class Orthant { nonneg, nonpos };

class OrthantCone final : public ProjectableCone {
  public:
    OrthantCone(Orthant sign, Eigen::Index m) : sign_(sign), m_(m) {}
    Eigen::Index dim() const override { return m_; }
    Vec project(const Vec &z) const override;
    bool contains(const Vec &z, double tol) const override;
    std::shared_ptr<const ProjectableCone> polar() const override;
    Orthant sign() const { return sign_; }

  private:
    Orthant sign_;
    Eigen::Index m_;
};

class BallSet final : public ProjectableSet {
  public:
    BallSet(Vec center, double radius);
    Eigen::Index dim() const override { return center_.size(); }
    Vec project(const Vec &z) const override;
    bool contains(const Vec &z, double tol) const override;

  private:
    Vec center_;
    double radius_;
};

/// Sphere ‖z − center‖ = radius. Nonconvex; projection picks the radial
/// point (and a fixed pole at the center).
class SphereSet final : public ProjectableSet {
  public:
    SphereSet(Vec center, double radius);
    Eigen::Index dim() const override { return center_.size(); }
    Vec project(const Vec &z) const override;
    bool contains(const Vec &z, double tol) const override;
    bool is_convex() const override { return false; }

  private:
    Vec center_;
    double radius_;
};

/// Cartesian product of sets over consecutive blocks of coordinates.
class ProductSet final : public ProjectableSet {
  public:
    explicit ProductSet(std::vector<std::shared_ptr<const ProjectableSet>> parts);
    Eigen::Index dim() const override { return dim_; }
    Vec project(const Vec &z) const override;
    bool contains(const Vec &z, double tol) const override;
    bool is_convex() const override;
    bool is_whole_space() const override;

    const std::vector<std::shared_ptr<const ProjectableSet>> &parts() const { return parts_; }

  private:
    std::vector<std::shared_ptr<const ProjectableSet>> parts_;
    Eigen::Index dim_ = 0;
};

// Regularizers ----------------------------------------------------------------

class ZeroRegularizer final : public ProxRegularizer {
  public:
    double value(const Vec &) const override { return 0.0; }
    Vec prox(const Vec &z, double) const override { return z; }
    bool is_zero() const override { return true; }
};

/// weight·‖z‖₁.
class L1Regularizer final : public ProxRegularizer {
  public:
    explicit L1Regularizer(double weight);
    double value(const Vec &z) const override;
    Vec prox(const Vec &z, double step) const override;

  private:
    double weight_;
};

/// (weight/2)·‖z‖².
class SquaredNormRegularizer final : public ProxRegularizer {
  public:
    explicit SquaredNormRegularizer(double weight);
    double value(const Vec &z) const override;
    Vec prox(const Vec &z, double step) const override;

  private:
    double weight_;
};

/// Projection onto `set`; the r ≡ 0 case of the scaled prox over a set.
Vec prox_zero_over_set(const ProjectableSet &set, const Vec &z, double step);

} // namespace pfbe
