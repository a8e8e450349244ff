#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "billiards/mirror.hpp"
#include "billiards/numeric.hpp"

namespace billiards {

template <typename Scalar = double>
struct ParticleState {
    Vec3<Scalar> position;
    Vec3<Scalar> velocity;
};

using ParticleStated = ParticleState<double>;

/// The three per-trajectory invariants: directrix-plane height H = |v|^2/(2g) + z,
/// reduced angular momentum l_z = x v_y - y v_x, and the radius R of the sphere
/// (centered on the mirror focus) carrying every flight-parabola focus.
template <typename Scalar = double>
struct ConservedTriple {
    Scalar directrix_height;
    Scalar angular_momentum;
    Scalar foci_radius;
};

/// One ballistic arc between reflections.
template <typename Scalar = double>
struct FlightSegment {
    ParticleState<Scalar> start;  ///< just after the previous reflection (or launch)
    Scalar impact_time;           ///< flight duration of this arc
    ParticleState<Scalar> end;    ///< at the boundary, velocity still incoming
    Vec3<Scalar> focus;           ///< focus point of the arc's parabola
    Scalar focal_length;          ///< F = (v_x^2+v_y^2)/(2g)
    Vec3<Scalar> vertex;          ///< apex S of the arc
};

/// Ballistic propagation by time t: r(t) = r0 + v t - (g t^2/2) e_z.
template <typename Scalar>
ParticleState<Scalar> fly(const ParticleState<Scalar>& s, Scalar t, const MirrorConfig<Scalar>& m)
{
    const Scalar g = m.gravity();
    ParticleState<Scalar> out;
    out.position = s.position + s.velocity * t - Vec3<Scalar>(0, 0, g * t * t / 2);
    out.velocity = s.velocity - Vec3<Scalar>(0, 0, g * t);
    return out;
}

/// Specular reflection of v about unit normal n. Pure formula, no checks.
template <typename Scalar>
Vec3<Scalar> specular(const Vec3<Scalar>& v, const Vec3<Scalar>& n)
{
    return v - 2 * n.dot(v) * n;
}

/// Law of reflection at boundary point p. The incoming velocity must point
/// out of the domain (v . n < 0); anything else is caller misuse.
template <typename Scalar>
Vec3<Scalar> reflect(const Vec3<Scalar>& p, const Vec3<Scalar>& v_in, const MirrorConfig<Scalar>& m)
{
    const Vec3<Scalar> n = inward_normal(p, m);
    if (!(n.dot(v_in) < Scalar(0)))
        throw std::invalid_argument("reflect: velocity is not incoming at the boundary point");
    return specular(v_in, n);
}

/// Time of the next boundary crossing. M(r(t)) is an exact quadratic in t:
///   a = -g/2 - (v_x^2+v_y^2)/(4f)   (always negative)
///   b = v_z - (x v_x + y v_y)/(2f)
///   c = M(r0)
/// The smallest root above the grazing tolerance is the impact; the root the
/// state is currently sitting on (a post-reflection state has c ~ 0) is skipped.
template <typename Scalar>
Scalar impact_time(const ParticleState<Scalar>& s, const MirrorConfig<Scalar>& m)
{
    const Scalar f = m.focal_length();
    const Scalar g = m.gravity();
    const Vec3<Scalar>& p = s.position;
    const Vec3<Scalar>& v = s.velocity;

    const Scalar a = -g / 2 - (v[0] * v[0] + v[1] * v[1]) / (4 * f);
    const Scalar b = v[2] - (p[0] * v[0] + p[1] * v[1]) / (2 * f);
    const Scalar c = boundary_value(p, m);

    const auto roots = quadratic_roots(a, b, c);
    if (!roots)
        throw no_impact_error("impact_time: no boundary crossing (state outside the mirror?)");

    const Scalar tol = m.graze_time_tol();
    if (roots->first > tol)
        return roots->first;
    if (roots->second > tol)
        return roots->second;

    // No usable forward root. b is v . grad M, so boundary states split into
    // tangential (grazing) and outgoing (caller misuse) by the normal speed.
    if (std::abs(c) <= m.boundary_tol()) {
        if (std::abs(b) <= m.graze_speed_tol() * boundary_gradient(p, m).norm())
            throw grazing_error("impact_time: tangential velocity at the boundary");
        throw no_impact_error("impact_time: boundary state moving out of the domain");
    }
    if (roots->second > Scalar(0))
        throw grazing_error("impact_time: forward root below grazing tolerance");
    throw no_impact_error("impact_time: no positive impact root");
}

template <typename Scalar>
Scalar flight_focal_length(const Vec3<Scalar>& v, const MirrorConfig<Scalar>& m)
{
    return (v[0] * v[0] + v[1] * v[1]) / (2 * m.gravity());
}

/// Focus of the flight parabola through state s. Constant along the arc.
template <typename Scalar>
Vec3<Scalar> flight_focus(const ParticleState<Scalar>& s, const MirrorConfig<Scalar>& m)
{
    const Scalar g = m.gravity();
    const Vec3<Scalar>& p = s.position;
    const Vec3<Scalar>& v = s.velocity;
    const Scalar h = v.squaredNorm() / (2 * g) + p[2];
    return {p[0] + v[0] * v[2] / g, p[1] + v[1] * v[2] / g, 2 * p[2] - h + v[2] * v[2] / g};
}

/// Apex S of the flight parabola through s (the arc point where v_z = 0).
template <typename Scalar>
Vec3<Scalar> flight_vertex(const ParticleState<Scalar>& s, const MirrorConfig<Scalar>& m)
{
    const Scalar g = m.gravity();
    const Vec3<Scalar>& p = s.position;
    const Vec3<Scalar>& v = s.velocity;
    const Scalar ts = v[2] / g;
    return {p[0] + v[0] * ts, p[1] + v[1] * ts, p[2] + v[2] * v[2] / (2 * g)};
}

template <typename Scalar>
ConservedTriple<Scalar> conserved(const ParticleState<Scalar>& s, const MirrorConfig<Scalar>& m)
{
    const Vec3<Scalar>& p = s.position;
    const Vec3<Scalar>& v = s.velocity;
    return {v.squaredNorm() / (2 * m.gravity()) + p[2],
            p[0] * v[1] - p[1] * v[0],
            flight_focus(s, m).norm()};
}

/// One event-driven bounce: flight to the boundary with per-arc geometry.
template <typename Scalar>
FlightSegment<Scalar> step(const ParticleState<Scalar>& s, const MirrorConfig<Scalar>& m)
{
    FlightSegment<Scalar> seg;
    seg.start = s;
    seg.impact_time = impact_time(s, m);
    seg.end = fly(s, seg.impact_time, m);
    seg.focus = flight_focus(s, m);
    seg.focal_length = flight_focal_length(s.velocity, m);
    seg.vertex = flight_vertex(s, m);
    return seg;
}

/// State just after the segment's reflection; start of the next arc.
template <typename Scalar>
ParticleState<Scalar> next_state(const FlightSegment<Scalar>& seg, const MirrorConfig<Scalar>& m)
{
    return {seg.end.position, reflect(seg.end.position, seg.end.velocity, m)};
}

enum class Termination { completed, grazing, no_impact };

inline const char* to_string(Termination t)
{
    switch (t) {
    case Termination::completed: return "completed";
    case Termination::grazing: return "grazing";
    case Termination::no_impact: return "no-impact";
    }
    return "unknown";
}

template <typename Scalar = double>
struct SimulationResult {
    std::vector<FlightSegment<Scalar>> segments;
    Termination termination = Termination::completed;
    std::string message;
};

/// Fold of step/reflect for n_bounces arcs. Truncates (never throws) on a
/// grazing or no-impact event, recording the cause.
template <typename Scalar>
SimulationResult<Scalar> simulate(const ParticleState<Scalar>& s0, long n_bounces,
                                  const MirrorConfig<Scalar>& m)
{
    SimulationResult<Scalar> result;
    result.segments.reserve(n_bounces > 0 ? static_cast<std::size_t>(n_bounces) : 0);
    ParticleState<Scalar> s = s0;
    for (long i = 0; i < n_bounces; ++i) {
        FlightSegment<Scalar> seg;
        try {
            seg = step(s, m);
        } catch (const grazing_error& e) {
            result.termination = Termination::grazing;
            result.message = e.what();
            return result;
        } catch (const no_impact_error& e) {
            result.termination = Termination::no_impact;
            result.message = e.what();
            return result;
        }
        const Vec3<Scalar> n = inward_normal(seg.end.position, m);
        if (-n.dot(seg.end.velocity) <= m.graze_speed_tol()) {
            result.termination = Termination::grazing;
            result.message = "tangential velocity at boundary point";
            result.segments.push_back(seg);
            return result;
        }
        s = {seg.end.position, specular(seg.end.velocity, n)};
        result.segments.push_back(seg);
    }
    return result;
}

} // namespace billiards
