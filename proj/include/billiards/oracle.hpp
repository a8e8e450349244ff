#pragma once

#include <cmath>
#include <cstdint>

#include "billiards/dynamics.hpp"
#include "billiards/mirror.hpp"

namespace billiards {

/// Brute-force propagator settings. dt is the fixed base step,
/// bisection_tol the time resolution of the boundary-crossing search.
template <typename Scalar = double>
struct OracleConfig {
    Scalar dt;
    Scalar bisection_tol;
    std::int64_t max_steps = 10'000'000;

    /// Scale-free defaults: dt = 1e-3 sqrt(f/g), bisection_tol = 1e-12 sqrt(f/g).
    static OracleConfig scaled(const MirrorConfig<Scalar>& m)
    {
        const Scalar tau = std::sqrt(m.focal_length() / m.gravity());
        return {Scalar(1e-3) * tau, Scalar(1e-12) * tau};
    }
};

using OracleConfigd = OracleConfig<double>;

template <typename Scalar = double>
struct OracleImpact {
    Vec3<Scalar> position;
    Vec3<Scalar> velocity;
    Scalar time;
};

namespace detail {

/// One classic RK4 step of (pos, vel)' = (vel, -g e_z). The right-hand side
/// is linear with a quadratic-in-time solution, so a single step of any size
/// reproduces the exact flight up to roundoff.
template <typename Scalar>
ParticleState<Scalar> rk4_step(const ParticleState<Scalar>& s, Scalar h, Scalar g)
{
    const Vec3<Scalar> grav(0, 0, -g);
    const Vec3<Scalar> k1p = s.velocity;
    const Vec3<Scalar> k2p = s.velocity + (h / 2) * grav;
    const Vec3<Scalar>& k3p = k2p;
    const Vec3<Scalar> k4p = s.velocity + h * grav;
    ParticleState<Scalar> out;
    out.position = s.position + (h / 6) * (k1p + 2 * k2p + 2 * k3p + k4p);
    out.velocity = s.velocity + h * grav;
    return out;
}

} // namespace detail

/// Integrates the flight with fixed RK4 steps until the boundary value
/// changes sign, then bisects the crossing time down to bisection_tol.
/// Independent of the closed-form impact solver; used to validate it.
template <typename Scalar>
OracleImpact<Scalar> oracle_step(const ParticleState<Scalar>& s, const MirrorConfig<Scalar>& m,
                                 const OracleConfig<Scalar>& cfg)
{
    const Scalar g = m.gravity();
    ParticleState<Scalar> inside = s;
    Scalar t_inside = 0;

    std::int64_t steps = 0;
    while (true) {
        if (++steps > cfg.max_steps)
            throw max_steps_error("oracle_step: no boundary crossing within max_steps");
        const ParticleState<Scalar> probe = detail::rk4_step(inside, cfg.dt, g);
        if (boundary_value(probe.position, m) < Scalar(0))
            break;
        inside = probe;
        t_inside += cfg.dt;
    }

    // Crossing bracketed in (0, dt] past `inside`; bisect the substep size.
    Scalar lo = 0, hi = cfg.dt;
    while (hi - lo > cfg.bisection_tol) {
        const Scalar mid = (lo + hi) / 2;
        const ParticleState<Scalar> probe = detail::rk4_step(inside, mid, g);
        if (boundary_value(probe.position, m) < Scalar(0))
            hi = mid;
        else
            lo = mid;
    }
    const Scalar dt_cross = (lo + hi) / 2;
    const ParticleState<Scalar> hit = detail::rk4_step(inside, dt_cross, g);
    return {hit.position, hit.velocity, t_inside + dt_cross};
}

} // namespace billiards
