#include "pfbe/sets.hpp"

#include <cmath>
#include <limits>

namespace pfbe {

// Box -----------------------------------------------------------------------

BoxSet::BoxSet(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    check_dim(hi_.size(), lo_.size(), "BoxSet bounds");
    for (Eigen::Index i = 0; i < lo_.size(); ++i)
        if (!(lo_[i] <= hi_[i]))
            throw PreconditionViolation("BoxSet: lo must not exceed hi");
}

std::shared_ptr<const BoxSet> BoxSet::uniform(Eigen::Index n, double lo, double hi) {
    return std::make_shared<const BoxSet>(Vec::Constant(n, lo), Vec::Constant(n, hi));
}

Vec BoxSet::project(const Vec &z) const {
    check_dim(z.size(), dim(), "BoxSet::project");
    return z.cwiseMax(lo_).cwiseMin(hi_);
}

bool BoxSet::contains(const Vec &z, double tol) const {
    check_dim(z.size(), dim(), "BoxSet::contains");
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (!(z[i] >= lo_[i] - tol && z[i] <= hi_[i] + tol))
            return false;
    return true;
}

bool BoxSet::is_whole_space() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return (lo_.array() == -inf).all() && (hi_.array() == inf).all();
}

// Whole space / zero cone -----------------------------------------------------

Vec WholeSpace::project(const Vec &z) const {
    check_dim(z.size(), n_, "WholeSpace::project");
    return z;
}

bool WholeSpace::contains(const Vec &z, double) const {
    check_dim(z.size(), n_, "WholeSpace::contains");
    return z.allFinite();
}

std::shared_ptr<const ProjectableCone> WholeSpace::polar() const {
    return std::make_shared<const ZeroCone>(n_);
}

Vec ZeroCone::project(const Vec &z) const {
    check_dim(z.size(), n_, "ZeroCone::project");
    return Vec::Zero(n_);
}

bool ZeroCone::contains(const Vec &z, double tol) const {
    check_dim(z.size(), n_, "ZeroCone::contains");
    return z.size() == 0 || z.lpNorm<Eigen::Infinity>() <= tol;
}

std::shared_ptr<const ProjectableCone> ZeroCone::polar() const {
    return std::make_shared<const WholeSpace>(n_);
}

// Orthant -------------------------------------------------------------------

Vec OrthantCone::project(const Vec &z) const {
    check_dim(z.size(), m_, "OrthantCone::project");
    return sign_ == Orthant::nonneg ? Vec(z.cwiseMax(0.0)) : Vec(z.cwiseMin(0.0));
}

bool OrthantCone::contains(const Vec &z, double tol) const {
    check_dim(z.size(), m_, "OrthantCone::contains");
    if (z.size() == 0)
        return true;
    return sign_ == Orthant::nonneg ? z.minCoeff() >= -tol : z.maxCoeff() <= tol;
}

std::shared_ptr<const ProjectableCone> OrthantCone::polar() const {
    return std::make_shared<const OrthantCone>(
        sign_ == Orthant::nonneg ? Orthant::nonpos : Orthant::nonneg, m_);
}

// Ball / sphere -------------------------------------------------------------

BallSet::BallSet(Vec center, double radius) : center_(std::move(center)), radius_(radius) {
    if (!(radius_ >= 0))
        throw PreconditionViolation("BallSet: radius must be nonnegative");
}

Vec BallSet::project(const Vec &z) const {
    check_dim(z.size(), dim(), "BallSet::project");
    const Vec d = z - center_;
    const double r = d.norm();
    if (r <= radius_)
        return z;
    return center_ + d * (radius_ / r);
}

bool BallSet::contains(const Vec &z, double tol) const {
    check_dim(z.size(), dim(), "BallSet::contains");
    return (z - center_).norm() <= radius_ + tol;
}

SphereSet::SphereSet(Vec center, double radius) : center_(std::move(center)), radius_(radius) {
    if (!(radius_ > 0))
        throw PreconditionViolation("SphereSet: radius must be positive");
}

Vec SphereSet::project(const Vec &z) const {
    check_dim(z.size(), dim(), "SphereSet::project");
    const Vec d = z - center_;
    const double r = d.norm();
    if (r == 0) {
        Vec pole = center_;
        pole[0] += radius_;
        return pole;
    }
    return center_ + d * (radius_ / r);
}

bool SphereSet::contains(const Vec &z, double tol) const {
    check_dim(z.size(), dim(), "SphereSet::contains");
    return std::abs((z - center_).norm() - radius_) <= tol;
}

// Product -------------------------------------------------------------------

ProductSet::ProductSet(std::vector<std::shared_ptr<const ProjectableSet>> parts)
    : parts_(std::move(parts)) {
    for (const auto &part : parts_)
        dim_ += part->dim();
}

Vec ProductSet::project(const Vec &z) const {
    check_dim(z.size(), dim_, "ProductSet::project");
    Vec out(dim_);
    Eigen::Index off = 0;
    for (const auto &part : parts_) {
        const Eigen::Index k = part->dim();
        out.segment(off, k) = part->project(z.segment(off, k));
        off += k;
    }
    return out;
}

bool ProductSet::contains(const Vec &z, double tol) const {
    check_dim(z.size(), dim_, "ProductSet::contains");
    Eigen::Index off = 0;
    for (const auto &part : parts_) {
        const Eigen::Index k = part->dim();
        if (!part->contains(z.segment(off, k), tol))
            return false;
        off += k;
    }
    return true;
}

bool ProductSet::is_convex() const {
    for (const auto &part : parts_)
        if (!part->is_convex())
            return false;
    return true;
}

bool ProductSet::is_whole_space() const {
    for (const auto &part : parts_)
        if (!part->is_whole_space())
            return false;
    return true;
}

// Regularizers --------------------------------------------------------------

L1Regularizer::L1Regularizer(double weight) : weight_(weight) {
    if (!(weight_ >= 0))
        throw PreconditionViolation("L1Regularizer: weight must be nonnegative");
}

double L1Regularizer::value(const Vec &z) const { return weight_ * z.lpNorm<1>(); }

Vec L1Regularizer::prox(const Vec &z, double step) const {
    const double t = weight_ * step;
    Vec out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        out[i] = std::copysign(std::max(std::abs(z[i]) - t, 0.0), z[i]);
    return out;
}

SquaredNormRegularizer::SquaredNormRegularizer(double weight) : weight_(weight) {
    if (!(weight_ >= 0))
        throw PreconditionViolation("SquaredNormRegularizer: weight must be nonnegative");
}

double SquaredNormRegularizer::value(const Vec &z) const { return 0.5 * weight_ * z.squaredNorm(); }

Vec SquaredNormRegularizer::prox(const Vec &z, double step) const {
    return z / (1.0 + weight_ * step);
}

Vec prox_zero_over_set(const ProjectableSet &set, const Vec &z, double step) {
    if (!(step > 0))
        throw PreconditionViolation("prox_zero_over_set: step must be positive");
    return set.project(z);
}

} // namespace pfbe
