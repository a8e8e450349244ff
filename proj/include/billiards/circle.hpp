#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

#include "billiards/dynamics.hpp"
#include "billiards/mirror.hpp"

namespace billiards {

/// Orbits whose reflection points all lie on one horizontal circle of the
/// mirror. step_angle is the azimuthal advance between consecutive
/// reflection points, in (0, pi]; counter-clockwise seen from above.
template <typename Scalar = double>
class CircleOrbitSpec {
public:
    CircleOrbitSpec(Scalar radius, Scalar step_angle) : radius_(radius), step_angle_(step_angle)
    {
        if (!(radius > Scalar(0)))
            throw std::invalid_argument("CircleOrbitSpec: radius must be positive");
        if (!(step_angle > Scalar(0)) || !(step_angle <= std::numbers::pi_v<Scalar>))
            throw std::invalid_argument("CircleOrbitSpec: step angle must lie in (0, pi]");
    }

    Scalar radius() const { return radius_; }
    Scalar step_angle() const { return step_angle_; }

    /// Height of the reflection circle on the mirror, r0^2/(4f) - f.
    Scalar height(const MirrorConfig<Scalar>& m) const
    {
        return boundary_point(radius_, Scalar(0), m)[2];
    }

private:
    Scalar radius_;
    Scalar step_angle_;
};

using CircleOrbitSpecd = CircleOrbitSpec<double>;

/// Cylindrical velocity components at a reflection point of a circle orbit.
template <typename Scalar = double>
struct CircleVelocities {
    Scalar radial;
    Scalar azimuthal;
    Scalar vertical;
};

/// The fundamental-parabola launch velocity, fully determined by (r0, theta)
/// and the mirror focal length:
///   v_r   = -(r0/2f) sqrt(g f (1 - cos theta))
///   v_phi =  (r0/2f) sqrt(g f (1 + cos theta))
///   v_z   =          sqrt(g f (1 - cos theta))
template <typename Scalar>
CircleVelocities<Scalar> circle_velocities(const CircleOrbitSpec<Scalar>& spec,
                                           const MirrorConfig<Scalar>& m)
{
    const Scalar f = m.focal_length();
    const Scalar g = m.gravity();
    const Scalar c = std::cos(spec.step_angle());
    const Scalar minus = std::sqrt(g * f * (1 - c));
    const Scalar plus = std::sqrt(std::max(Scalar(0), g * f * (1 + c)));
    const Scalar rf = spec.radius() / (2 * f);
    return {-rf * minus, rf * plus, minus};
}

/// Launch state on the reflection circle at the given azimuth, moving
/// counter-clockwise (just after a reflection).
template <typename Scalar>
ParticleState<Scalar> circle_launch_state(const CircleOrbitSpec<Scalar>& spec,
                                          const MirrorConfig<Scalar>& m, Scalar azimuth = Scalar(0))
{
    const auto v = circle_velocities(spec, m);
    const Scalar ca = std::cos(azimuth), sa = std::sin(azimuth);
    const Vec3<Scalar> e_r{ca, sa, Scalar(0)};
    const Vec3<Scalar> e_phi{-sa, ca, Scalar(0)};
    ParticleState<Scalar> s;
    s.position = boundary_point(spec.radius(), azimuth, m);
    s.velocity = v.radial * e_r + v.azimuthal * e_phi + Vec3<Scalar>(0, 0, v.vertical);
    return s;
}

/// Step angle from the launch velocity components: theta = pi - 2 atan|v_phi/v_r|.
/// Exact inverse of circle_velocities.
template <typename Scalar>
Scalar step_angle(Scalar v_radial, Scalar v_azimuthal)
{
    if (v_radial == Scalar(0) && v_azimuthal == Scalar(0))
        throw std::invalid_argument("step_angle: undefined for zero horizontal velocity");
    return std::numbers::pi_v<Scalar> - 2 * std::atan(std::abs(v_azimuthal / v_radial));
}

/// Height of the common rotational surface swept by all flight parabolas of
/// the orbit: g(r) = r0^2/(4f) - f r^2/r0^2 on r in [r0 cos(theta/2), r0].
template <typename Scalar>
Scalar flight_surface(Scalar r, const CircleOrbitSpec<Scalar>& spec, const MirrorConfig<Scalar>& m)
{
    const Scalar r0 = spec.radius();
    const Scalar lo = r0 * std::cos(spec.step_angle() / 2);
    const Scalar slack = Scalar(1e-12) * r0;
    if (r < lo - slack || r > r0 + slack)
        throw out_of_range_error("flight_surface: radius outside [r0 cos(theta/2), r0]");
    const Scalar f = m.focal_length();
    return r0 * r0 / (4 * f) - f * r * r / (r0 * r0);
}

/// Period q if q*theta is an integer multiple of 2*pi for some q <= max_period,
/// detected through continued-fraction convergents of theta/(2*pi); nullopt
/// for (numerically) irrational multiples.
template <typename Scalar>
std::optional<std::uint64_t> classify_orbit(Scalar theta, Scalar tol = Scalar(1e-9),
                                            std::uint64_t max_period = 1'000'000)
{
    const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
    const Scalar x = theta / two_pi;
    if (!(x > Scalar(0)) || !(x <= Scalar(0.5)))
        throw std::invalid_argument("classify_orbit: step angle must lie in (0, pi]");

    // Convergents p_k/q_k of the continued fraction of x.
    std::uint64_t p_prev = 1, q_prev = 0;
    std::uint64_t p = 0, q = 1;
    Scalar frac = x;
    for (int k = 0; k < 64; ++k) {
        if (p >= 1 && q <= max_period && std::abs(Scalar(q) * theta - Scalar(p) * two_pi) <= tol)
            return q;
        if (frac < std::numeric_limits<Scalar>::epsilon())
            break;
        frac = 1 / frac;
        const Scalar af = std::floor(frac);
        if (af > Scalar(1e18))
            break;
        const auto a = static_cast<std::uint64_t>(af);
        frac -= af;
        const std::uint64_t p_next = a * p + p_prev;
        const std::uint64_t q_next = a * q + q_prev;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        if (q > max_period && q_prev > max_period)
            break;
    }
    return std::nullopt;
}

/// True when the meridional velocity v_r e_r + v_z e_z at radius r0 is
/// parallel to the boundary gradient (the circle-orbit condition).
template <typename Scalar>
bool meridional_parallel_to_gradient(Scalar r0, Scalar v_radial, Scalar v_vertical,
                                     const MirrorConfig<Scalar>& m)
{
    const Vec3<Scalar> p = boundary_point(r0, Scalar(0), m);
    const Vec3<Scalar> grad = boundary_gradient(p, m).normalized();
    Vec3<Scalar> merid{v_radial, Scalar(0), v_vertical};
    const Scalar norm = merid.norm();
    if (norm == Scalar(0))
        return false;
    merid /= norm;
    return merid.cross(grad).norm() < Scalar(1e-9);
}

template <typename Scalar>
bool perpendicularity_check(const CircleOrbitSpec<Scalar>& spec, const MirrorConfig<Scalar>& m)
{
    const auto v = circle_velocities(spec, m);
    return meridional_parallel_to_gradient(spec.radius(), v.radial, v.vertical, m);
}

} // namespace billiards
