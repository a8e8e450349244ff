#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "billiards/errors.hpp"

namespace billiards {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec3d = Vec3<double>;

/// The world: an ideally reflecting paraboloid z = (x^2+y^2)/(4 f) - f with
/// focus at the origin, and uniform gravity -g e_z. Unit particle mass.
template <typename Scalar = double>
class MirrorConfig {
public:
    MirrorConfig(Scalar focal_length, Scalar gravity)
        : focal_length_(focal_length), gravity_(gravity)
    {
        if (!(focal_length > Scalar(0)) || !std::isfinite(focal_length))
            throw std::invalid_argument("MirrorConfig: focal length must be positive");
        if (!(gravity > Scalar(0)) || !std::isfinite(gravity))
            throw std::invalid_argument("MirrorConfig: gravity must be positive");
    }
    MirrorConfig() : MirrorConfig(Scalar(1), Scalar(1)) {}

    Scalar focal_length() const { return focal_length_; }
    Scalar gravity() const { return gravity_; }

    /// Scale-aware absolute tolerance for "point lies on the boundary".
    Scalar boundary_tol() const { return Scalar(1e-9) * std::max(Scalar(1), focal_length_); }

    /// Characteristic time sqrt(f/g); impact roots below 1e-10 of it are
    /// re-hits of the current reflection point.
    Scalar graze_time_tol() const { return Scalar(1e-10) * std::sqrt(focal_length_ / gravity_); }

    /// Tangential-speed threshold below which a boundary hit counts as grazing.
    Scalar graze_speed_tol() const { return Scalar(1e-10) * std::sqrt(focal_length_ * gravity_); }

private:
    Scalar focal_length_;
    Scalar gravity_;
};

using MirrorConfigd = MirrorConfig<double>;

/// M(x,y,z) = z - (x^2+y^2)/(4f) + f. Zero on the boundary, positive strictly
/// inside the mirror, negative outside.
template <typename Derived>
typename Derived::Scalar boundary_value(const Eigen::MatrixBase<Derived>& p,
                                        const MirrorConfig<typename Derived::Scalar>& m)
{
    EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
    using Scalar = typename Derived::Scalar;
    const Scalar f = m.focal_length();
    return p[2] - (p[0] * p[0] + p[1] * p[1]) / (4 * f) + f;
}

/// Gradient of M; points inside, not normalized.
template <typename Derived>
Vec3<typename Derived::Scalar> boundary_gradient(const Eigen::MatrixBase<Derived>& p,
                                                 const MirrorConfig<typename Derived::Scalar>& m)
{
    EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
    using Scalar = typename Derived::Scalar;
    const Scalar f2 = 2 * m.focal_length();
    return {-p[0] / f2, -p[1] / f2, Scalar(1)};
}

/// Unit normal at a boundary point, pointing into the mirror domain.
/// Rejects points farther from the boundary than the mirror tolerance.
template <typename Derived>
Vec3<typename Derived::Scalar> inward_normal(const Eigen::MatrixBase<Derived>& p,
                                             const MirrorConfig<typename Derived::Scalar>& m)
{
    using std::abs;
    if (abs(boundary_value(p, m)) > m.boundary_tol())
        throw out_of_range_error("inward_normal: point is not on the mirror boundary");
    return boundary_gradient(p, m).normalized();
}

/// Boundary point at cylindrical radius r and azimuth phi.
template <typename Scalar>
Vec3<Scalar> boundary_point(Scalar r, Scalar azimuth, const MirrorConfig<Scalar>& m)
{
    if (r < Scalar(0))
        throw out_of_range_error("boundary_point: radius must be non-negative");
    const Scalar f = m.focal_length();
    return {r * std::cos(azimuth), r * std::sin(azimuth), r * r / (4 * f) - f};
}

} // namespace billiards
