#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "billiards/dynamics.hpp"
#include "billiards/mirror.hpp"
#include "billiards/numeric.hpp"

namespace billiards {

/// Confined-domain parameters (H, R, l_z) for a mirror. Construction rejects
/// parameter sets for which no motion exists (l_z^2 > J_max) or whose
/// directrix plane lies at or below the apex.
template <typename Scalar = double>
class DomainSpec {
public:
    DomainSpec(Scalar directrix_height, Scalar foci_radius, Scalar angular_momentum,
               MirrorConfig<Scalar> mirror)
        : directrix_height_(directrix_height),
          foci_radius_(foci_radius),
          angular_momentum_(angular_momentum),
          mirror_(mirror)
    {
        if (!(foci_radius >= Scalar(0)))
            throw std::invalid_argument("DomainSpec: foci-sphere radius must be non-negative");
        if (!(directrix_height > -mirror.focal_length()))
            throw std::invalid_argument("DomainSpec: directrix height must exceed the apex depth");
        const Scalar jm = j_max_value();
        if (angular_momentum * angular_momentum > jm * (1 + Scalar(1e-9)) + Scalar(1e-300))
            throw empty_interval_error("DomainSpec: l_z^2 exceeds J_max, no motion exists");
    }

    Scalar directrix_height() const { return directrix_height_; }
    Scalar foci_radius() const { return foci_radius_; }
    Scalar angular_momentum() const { return angular_momentum_; }
    const MirrorConfig<Scalar>& mirror() const { return mirror_; }

private:
    Scalar j_max_value() const;

    Scalar directrix_height_;
    Scalar foci_radius_;
    Scalar angular_momentum_;
    MirrorConfig<Scalar> mirror_;
};

using DomainSpecd = DomainSpec<double>;

/// J(H,R,theta) = g R^2 sin^2(theta) (H - R cos theta). Admissible polar
/// angles satisfy J >= l_z^2.
template <typename Scalar>
Scalar J(Scalar theta, const DomainSpec<Scalar>& spec)
{
    const Scalar R = spec.foci_radius();
    const Scalar s = std::sin(theta);
    return spec.mirror().gravity() * R * R * s * s *
           (spec.directrix_height() - R * std::cos(theta));
}

/// Polar angle maximizing J: cos(theta_max) = (H - sqrt(H^2+3R^2)) / (3R),
/// evaluated in the rationalized form -R/(H + sqrt(H^2+3R^2)).
template <typename Scalar>
Scalar theta_max(const DomainSpec<Scalar>& spec)
{
    const Scalar R = spec.foci_radius();
    if (R == Scalar(0))
        throw degenerate_sphere_error("theta_max: undefined for a zero-radius foci sphere");
    const Scalar H = spec.directrix_height();
    const Scalar c = -R / (H + std::sqrt(H * H + 3 * R * R));
    return std::acos(std::clamp(c, Scalar(-1), Scalar(1)));
}

/// J(theta_max) = (2/27) g (sqrt(H^2+3R^2)+2H)(H(sqrt(H^2+3R^2)-H)+3R^2),
/// evaluated as (2g/9) R^2 (s+2H)^2/(s+H), s = sqrt(H^2+3R^2). Upper bound
/// for l_z^2.
template <typename Scalar>
Scalar J_max(const DomainSpec<Scalar>& spec)
{
    const Scalar R = spec.foci_radius();
    if (R == Scalar(0))
        return Scalar(0);
    const Scalar H = spec.directrix_height();
    if (H + R <= Scalar(0))
        return Scalar(0);
    const Scalar s = std::sqrt(H * H + 3 * R * R);
    const Scalar t = s + 2 * H;
    return (2 * spec.mirror().gravity() / 9) * R * R * t * t / (s + H);
}

template <typename Scalar>
Scalar DomainSpec<Scalar>::j_max_value() const
{
    return J_max(*this);
}

template <typename Scalar>
struct AngleInterval {
    Scalar lower;
    Scalar upper;
    Scalar width() const { return upper - lower; }
};

namespace detail {

/// Smallest angle with a real vertex speed (H - R cos theta >= 0).
template <typename Scalar>
Scalar reality_floor(const DomainSpec<Scalar>& spec)
{
    const Scalar H = spec.directrix_height();
    const Scalar R = spec.foci_radius();
    if (R == Scalar(0) || H >= R)
        return Scalar(0);
    return std::acos(std::clamp(H / R, Scalar(-1), Scalar(1)));
}

} // namespace detail

/// The maximal angle interval around theta_max with J(theta) >= l_z^2,
/// intersected with the real-vertex-speed region (H - R cos theta >= 0).
/// J is unimodal there, so one bisection per side locates the edges.
template <typename Scalar>
AngleInterval<Scalar> admissible_theta(const DomainSpec<Scalar>& spec)
{
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar lz2 = spec.angular_momentum() * spec.angular_momentum();
    const Scalar R = spec.foci_radius();

    if (R == Scalar(0)) {
        if (!(spec.directrix_height() > Scalar(0)))
            throw empty_interval_error("admissible_theta: degenerate domain without motion");
        return {Scalar(0), pi};
    }

    const Scalar peak = theta_max(spec);
    const Scalar jm = J_max(spec);
    if (lz2 > jm * (1 + Scalar(1e-9)) + Scalar(1e-300))
        throw empty_interval_error("admissible_theta: l_z^2 exceeds J_max");
    if (lz2 >= jm || jm - lz2 <= Scalar(1e-14) * jm)
        return {peak, peak};

    const Scalar lo = detail::reality_floor(spec);
    const auto excess = [&](Scalar theta) { return J(theta, spec) - lz2; };
    if (excess(peak) < Scalar(0))
        throw empty_interval_error("admissible_theta: inconsistent bracket sign structure");

    const Scalar x_tol = Scalar(1e-15);
    const Scalar lower = excess(lo) >= Scalar(0) ? lo : bisect_root(excess, lo, peak, x_tol);
    const Scalar upper = lz2 == Scalar(0) ? pi : bisect_root(excess, peak, pi, x_tol);
    return {lower, upper};
}

/// Minimal radial distance of the theta-parabola from the axis,
/// r_min = |l_z| / sqrt(g (H - R cos theta)).
template <typename Scalar>
Scalar r_min(Scalar theta, const DomainSpec<Scalar>& spec)
{
    const Scalar lz = spec.angular_momentum();
    if (lz == Scalar(0))
        return Scalar(0);
    const Scalar u = spec.directrix_height() - spec.foci_radius() * std::cos(theta);
    if (!(u > Scalar(0)))
        throw out_of_range_error("r_min: angle has no real vertex speed");
    return std::abs(lz) / std::sqrt(spec.mirror().gravity() * u);
}

/// Both allowed propagation heights at radius r for the theta-parabola.
/// The plus branch (outer arc) never exceeds the minus branch; the two
/// coincide at r = r_min.
template <typename Scalar>
struct HeightPair {
    Scalar plus;
    Scalar minus;
};

namespace detail {

template <typename Scalar>
std::optional<HeightPair<Scalar>> height_pair_clamped(Scalar r, Scalar theta,
                                                      const DomainSpec<Scalar>& spec)
{
    const Scalar H = spec.directrix_height();
    const Scalar R = spec.foci_radius();
    const Scalar lz = spec.angular_momentum();
    const Scalar g = spec.mirror().gravity();
    const Scalar c = std::cos(theta);
    const Scalar s = std::sin(theta);
    const Scalar u = H - R * c;
    const Scalar scale = std::max(Scalar(1), std::abs(H) + R);
    if (!(u > Scalar(1e-14) * scale))
        return std::nullopt;

    const Scalar gu = g * u;
    const Scalar lz2 = lz * lz;
    const Scalar tol = Scalar(1e-10) * std::max({r * r * gu, lz2, Scalar(1)});
    Scalar a2 = r * r * gu - lz2;
    Scalar b2 = R * R * s * s * gu - lz2;
    if (a2 < -tol || b2 < -tol)
        return std::nullopt;
    a2 = std::max(a2, Scalar(0));
    b2 = std::max(b2, Scalar(0));

    const Scalar a = std::sqrt(a2);
    const Scalar b = std::sqrt(b2);
    const Scalar base = (H + R * c) / 2;
    const Scalar dp = (a + b) / gu;
    const Scalar dm = (a - b) / gu;
    return HeightPair<Scalar>{base - g * dp * dp / 2, base - g * dm * dm / 2};
}

/// Height at the turning radius r_min(theta), where the first root of the
/// height formula vanishes identically (computing it would only inject
/// sqrt(eps) noise).
template <typename Scalar>
Scalar turning_height(Scalar theta, const DomainSpec<Scalar>& spec)
{
    const Scalar H = spec.directrix_height();
    const Scalar R = spec.foci_radius();
    const Scalar g = spec.mirror().gravity();
    const Scalar c = std::cos(theta);
    const Scalar gu = g * (H - R * c);
    const Scalar lz = spec.angular_momentum();
    const Scalar b = std::sqrt(std::max(J(theta, spec) - lz * lz, Scalar(0)));
    return (H + R * c) / 2 - g * (b / gu) * (b / gu) / 2;
}

/// Single-member height at exact saturation l_z^2 = J(theta), where the
/// second root vanishes identically.
template <typename Scalar>
std::optional<Scalar> saturated_height(Scalar r, Scalar theta, const DomainSpec<Scalar>& spec)
{
    const Scalar H = spec.directrix_height();
    const Scalar R = spec.foci_radius();
    const Scalar g = spec.mirror().gravity();
    const Scalar c = std::cos(theta);
    const Scalar u = H - R * c;
    if (!(u > Scalar(1e-14) * std::max(Scalar(1), std::abs(H) + R)))
        return std::nullopt;
    const Scalar gu = g * u;
    const Scalar lz2 = spec.angular_momentum() * spec.angular_momentum();
    const Scalar a2 = r * r * gu - lz2;
    if (a2 < -Scalar(1e-10) * std::max({r * r * gu, lz2, Scalar(1)}))
        return std::nullopt;
    const Scalar a = std::sqrt(std::max(a2, Scalar(0)));
    return (H + R * c) / 2 - g * (a / gu) * (a / gu) / 2;
}

} // namespace detail

template <typename Scalar>
HeightPair<Scalar> height_pair(Scalar r, Scalar theta, const DomainSpec<Scalar>& spec)
{
    const auto h = detail::height_pair_clamped(r, theta, spec);
    if (!h)
        throw out_of_range_error(
            "height_pair: radius below r_min or angle outside the admissible interval");
    return *h;
}

/// Family member theta evaluated at flight time t (t = 0 at the vertex):
///   x = R sin(theta) + t sqrt(g(H - R cos theta) - l_z^2/(R^2 sin^2 theta))
///   y = t l_z / (R sin theta)
///   z = -g t^2/2 + (H + R cos theta)/2
template <typename Scalar>
Vec3<Scalar> parabola_family(Scalar theta, Scalar t, const DomainSpec<Scalar>& spec)
{
    const Scalar H = spec.directrix_height();
    const Scalar R = spec.foci_radius();
    const Scalar lz = spec.angular_momentum();
    const Scalar g = spec.mirror().gravity();
    const Scalar c = std::cos(theta);
    const Scalar s = std::sin(theta);
    const Scalar rs = R * s;

    Scalar vx2 = g * (H - R * c);
    Scalar vy = Scalar(0);
    if (lz != Scalar(0)) {
        if (rs == Scalar(0))
            throw std::invalid_argument("parabola_family: sin(theta)=0 with non-zero l_z");
        vy = lz / rs;
        vx2 -= vy * vy;
    }
    if (vx2 < -Scalar(1e-10) * std::max(Scalar(1), g * (std::abs(H) + R)))
        throw out_of_range_error("parabola_family: angle outside the admissible interval");
    vx2 = std::max(vx2, Scalar(0));

    return {rs + t * std::sqrt(vx2), t * vy, -g * t * t / 2 + (H + R * c) / 2};
}

enum class HeightBranch { plus, minus };

/// Envelope-defining residual K(z, r, theta) = z - h_branch(r, theta).
/// Envelope points satisfy K = 0 together with dK/dtheta = 0.
template <typename Scalar>
Scalar envelope_residual(Scalar z, Scalar r, Scalar theta, HeightBranch branch,
                         const DomainSpec<Scalar>& spec)
{
    const auto h = height_pair(r, theta, spec);
    return z - (branch == HeightBranch::plus ? h.plus : h.minus);
}

/// Vertex-frame data of one family member: apex position on the foci-sphere
/// meridian shell, apex speed, and the apex-velocity azimuth phi' fixed by
/// angular-momentum conservation.
template <typename Scalar = double>
struct VertexData {
    Scalar theta;
    Vec3<Scalar> vertex;
    Scalar vertex_speed;
    Scalar phi_prime;
};

template <typename Scalar>
VertexData<Scalar> vertex_data_from_angles(Scalar theta, Scalar phi, const DomainSpec<Scalar>& spec)
{
    const Scalar H = spec.directrix_height();
    const Scalar R = spec.foci_radius();
    const Scalar lz = spec.angular_momentum();
    const Scalar c = std::cos(theta);
    const Scalar s = std::sin(theta);
    const Scalar u = H - R * c;
    if (u < -Scalar(1e-12) * std::max(Scalar(1), std::abs(H) + R))
        throw out_of_range_error("vertex_data: angle has no real vertex speed");

    VertexData<Scalar> out;
    out.theta = theta;
    out.vertex = {R * s * std::cos(phi), R * s * std::sin(phi), (H + R * c) / 2};
    out.vertex_speed = std::sqrt(std::max(u, Scalar(0)) * spec.mirror().gravity());

    const Scalar denom = R * s * out.vertex_speed;
    if (denom == Scalar(0)) {
        if (lz != Scalar(0))
            throw out_of_range_error("vertex_data: zero moment arm with non-zero l_z");
        out.phi_prime = phi;
    } else {
        const Scalar ratio = lz / denom;
        if (std::abs(ratio) > 1 + Scalar(1e-9))
            throw out_of_range_error("vertex_data: angle outside the admissible interval");
        out.phi_prime = phi + std::asin(std::clamp(ratio, Scalar(-1), Scalar(1)));
    }
    return out;
}

/// Vertex data of a simulated flight segment, read off its focus point.
template <typename Scalar>
VertexData<Scalar> vertex_data(const FlightSegment<Scalar>& seg, const MirrorConfig<Scalar>& m)
{
    const auto trip = conserved(seg.start, m);
    const Scalar R = trip.foci_radius;
    Scalar theta = std::numbers::pi_v<Scalar> / 2;
    Scalar phi = Scalar(0);
    if (R > Scalar(0)) {
        theta = std::acos(std::clamp(seg.focus[2] / R, Scalar(-1), Scalar(1)));
        if (seg.focus[0] != Scalar(0) || seg.focus[1] != Scalar(0))
            phi = std::atan2(seg.focus[1], seg.focus[0]);
    }
    DomainSpec<Scalar> spec(trip.directrix_height, R, trip.angular_momentum, m);
    return vertex_data_from_angles(theta, phi, spec);
}

// ---------------------------------------------------------------------------
// Envelope extraction
// ---------------------------------------------------------------------------

template <typename Scalar = double>
struct EnvelopeCurve {
    enum class Label { upper, lower, inner_barrier, max_lz };
    Label label;
    std::vector<Eigen::Matrix<Scalar, 2, 1>> samples; ///< (r, z), r strictly increasing
    std::vector<Scalar> thetas;                       ///< extremizing angle per sample
    std::vector<std::uint8_t> interior; ///< 1 = interior stationary point of h(., theta)
};

using EnvelopeCurved = EnvelopeCurve<double>;

inline const char* to_string(EnvelopeCurved::Label label)
{
    switch (label) {
    case EnvelopeCurved::Label::upper: return "upper";
    case EnvelopeCurved::Label::lower: return "lower";
    case EnvelopeCurved::Label::inner_barrier: return "inner_barrier";
    case EnvelopeCurved::Label::max_lz: return "max_lz";
    }
    return "unknown";
}

template <typename Scalar = double>
struct EnvelopeOptions {
    int scan_points = 2048;
    Scalar theta_tol = Scalar(1e-10);
    int barrier_samples = 512;
};

template <typename Scalar = double>
struct EnvelopeSet {
    std::vector<EnvelopeCurve<Scalar>> curves;
    std::vector<Scalar> gaps; ///< grid radii not reachable by any admissible parabola
};

namespace detail {

/// Feasibility floor in theta for radius r: r >= r_min(theta) needs
/// cos(theta) <= (H - l_z^2/(g r^2))/R. Returns nullopt when no angle works.
template <typename Scalar>
std::optional<Scalar> feasible_theta_floor(Scalar r, const DomainSpec<Scalar>& spec)
{
    const Scalar lz = spec.angular_momentum();
    if (lz == Scalar(0))
        return Scalar(0);
    if (r <= Scalar(0))
        return std::nullopt;
    const Scalar R = spec.foci_radius();
    const Scalar w = lz * lz / (spec.mirror().gravity() * r * r);
    if (R == Scalar(0))
        return spec.directrix_height() >= w ? std::optional<Scalar>(Scalar(0)) : std::nullopt;
    const Scalar arg = (spec.directrix_height() - w) / R;
    if (arg >= Scalar(1))
        return Scalar(0);
    if (arg < Scalar(-1))
        return std::nullopt;
    return std::acos(arg);
}

} // namespace detail

/// Confined-domain envelope over the given radius grid: per radius, the
/// extremal heights over the admissible angle interval (golden-section
/// refinement seeded by a scan). At l_z^2 = J_max the family collapses to a
/// single member and one max_lz-labelled curve is returned; for l_z != 0 the
/// turning-point curve near the axis is returned as inner_barrier.
template <typename Scalar>
EnvelopeSet<Scalar> envelope(const DomainSpec<Scalar>& spec, std::span<const Scalar> r_grid,
                             const EnvelopeOptions<Scalar>& opts = {})
{
    EnvelopeSet<Scalar> out;
    const auto interval = admissible_theta(spec);
    const bool collapsed = interval.width() <= Scalar(1e-9);
    if (collapsed) {
        const Scalar peak = interval.lower;
        EnvelopeCurve<Scalar> curve;
        curve.label = EnvelopeCurve<Scalar>::Label::max_lz;
        for (const Scalar r : r_grid) {
            const auto h = detail::saturated_height(r, peak, spec);
            if (!h) {
                out.gaps.push_back(r);
                continue;
            }
            curve.samples.push_back({r, *h});
            curve.thetas.push_back(peak);
            curve.interior.push_back(0);
        }
        if (curve.samples.empty() && !r_grid.empty())
            throw out_of_range_error("envelope: degenerate domain, no reachable radius");
        out.curves.push_back(std::move(curve));
        return out;
    }

    EnvelopeCurve<Scalar> upper{EnvelopeCurve<Scalar>::Label::upper, {}, {}, {}};
    EnvelopeCurve<Scalar> lower{EnvelopeCurve<Scalar>::Label::lower, {}, {}, {}};
    const Scalar edge_tol = std::max(Scalar(1e-9), Scalar(1e-6) * interval.width());

    for (const Scalar r : r_grid) {
        const auto floor_theta = detail::feasible_theta_floor(r, spec);
        if (!floor_theta) {
            out.gaps.push_back(r);
            continue;
        }
        const Scalar lo = std::max(interval.lower, *floor_theta);
        const Scalar hi = interval.upper;
        if (lo > hi) {
            out.gaps.push_back(r);
            continue;
        }

        const auto maximize = [&](auto branch_of) {
            const auto f = [&](Scalar theta) {
                const auto h = detail::height_pair_clamped(r, theta, spec);
                return h ? branch_of(*h) : -std::numeric_limits<Scalar>::infinity();
            };
            return scan_golden_max(f, lo, hi, opts.scan_points, opts.theta_tol);
        };

        const auto top = maximize([](const HeightPair<Scalar>& h) { return h.minus; });
        const auto bottom = maximize([](const HeightPair<Scalar>& h) { return -h.plus; });
        if (!std::isfinite(top.value) || !std::isfinite(bottom.value)) {
            out.gaps.push_back(r);
            continue;
        }

        const auto push = [&](EnvelopeCurve<Scalar>& curve, Scalar z, Scalar theta) {
            curve.samples.push_back({r, z});
            curve.thetas.push_back(theta);
            curve.interior.push_back(theta - lo > edge_tol && hi - theta > edge_tol ? 1 : 0);
        };
        push(upper, top.value, top.x);
        push(lower, -bottom.value, bottom.x);
    }

    out.curves.push_back(std::move(upper));
    out.curves.push_back(std::move(lower));

    if (spec.angular_momentum() != Scalar(0) && opts.barrier_samples > 1) {
        EnvelopeCurve<Scalar> barrier{EnvelopeCurve<Scalar>::Label::inner_barrier, {}, {}, {}};
        const int n = opts.barrier_samples;
        const Scalar scale = std::max(Scalar(1), std::abs(spec.directrix_height()) +
                                                     spec.foci_radius());
        for (int i = 0; i < n; ++i) {
            // descending theta => ascending turning radius
            const Scalar theta =
                interval.upper - interval.width() * Scalar(i) / Scalar(n - 1);
            const Scalar u =
                spec.directrix_height() - spec.foci_radius() * std::cos(theta);
            if (!(u > Scalar(1e-14) * scale))
                continue;
            const Scalar r = r_min(theta, spec);
            if (!barrier.samples.empty() && !(r > barrier.samples.back()[0]))
                continue;
            barrier.samples.push_back({r, detail::turning_height(theta, spec)});
            barrier.thetas.push_back(theta);
            barrier.interior.push_back(0);
        }
        out.curves.push_back(std::move(barrier));
    }

    return out;
}

// ---------------------------------------------------------------------------
// Closed-form limiting cases
// ---------------------------------------------------------------------------

/// l_z = 0 envelope pair c_pm(r) = (H +- R)/2 - r^2 / (2 (H +- R)).
template <typename Scalar>
std::pair<Scalar, Scalar> limit_c_pm(Scalar r, const DomainSpec<Scalar>& spec)
{
    if (spec.angular_momentum() != Scalar(0))
        throw out_of_range_error("limit_c_pm: defined for the l_z = 0 regime");
    const Scalar H = spec.directrix_height();
    const Scalar R = spec.foci_radius();
    if (H == R)
        throw out_of_range_error("limit_c_pm: degenerate at H = R");
    const Scalar cp = (H + R) / 2 - r * r / (2 * (H + R));
    const Scalar cm = (H - R) / 2 - r * r / (2 * (H - R));
    return {cp, cm};
}

/// Coefficient of r^2 in c_0; changes sign exactly at R = H
/// (Mexican-hat regime for R > H).
template <typename Scalar>
Scalar limit_c0_r2_coefficient(const DomainSpec<Scalar>& spec)
{
    const Scalar lz = spec.angular_momentum();
    if (lz == Scalar(0))
        throw out_of_range_error("limit_c0: defined for non-zero l_z");
    const Scalar H = spec.directrix_height();
    const Scalar R = spec.foci_radius();
    return spec.mirror().gravity() * (H * H - R * R) / (2 * lz * lz);
}

/// Small-l_z angular-momentum barrier c_0(r) = g r^2 ((H^2-R^2) + r^2) / (2 l_z^2).
template <typename Scalar>
Scalar limit_c0(Scalar r, const DomainSpec<Scalar>& spec)
{
    const Scalar lz = spec.angular_momentum();
    if (lz == Scalar(0))
        throw out_of_range_error("limit_c0: defined for non-zero l_z");
    const Scalar H = spec.directrix_height();
    const Scalar R = spec.foci_radius();
    const Scalar g = spec.mirror().gravity();
    return g * r * r * ((H * H - R * R) + r * r) / (2 * lz * lz);
}

/// Large-l_z window half-width: half of the admissible angle interval.
template <typename Scalar>
Scalar c_tilde_half_width(const DomainSpec<Scalar>& spec)
{
    return admissible_theta(spec).width() / 2;
}

/// Large-l_z approximate envelope pair: the height expression with the
/// second root dropped, evaluated at theta_max -+ delta where
/// delta = |theta - theta_max|. First element is the theta_max - delta side.
template <typename Scalar>
std::pair<Scalar, Scalar> limit_c_tilde(Scalar r, Scalar theta, const DomainSpec<Scalar>& spec)
{
    const Scalar peak = theta_max(spec);
    const Scalar delta = std::abs(theta - peak);
    if (delta > c_tilde_half_width(spec) * (1 + Scalar(1e-12)))
        throw out_of_range_error("limit_c_tilde: angle outside the admissible window");
    const Scalar H = spec.directrix_height();
    const Scalar R = spec.foci_radius();
    const Scalar ring2 = R * R * std::sin(peak) * std::sin(peak);
    const auto at = [&](Scalar a) {
        const Scalar c = std::cos(a);
        return (H + R * c) / 2 - (r * r - ring2) / (2 * (H - R * c));
    };
    return {at(peak - delta), at(peak + delta)};
}

/// Maximal-l_z single height function
/// d(r) = (H + R cos theta_max)/2 - (r^2 - R^2 sin^2 theta_max)/(2 (H - R cos theta_max)),
/// defined for r >= R sin(theta_max).
template <typename Scalar>
Scalar limit_d(Scalar r, const DomainSpec<Scalar>& spec)
{
    const Scalar H = spec.directrix_height();
    const Scalar R = spec.foci_radius();
    if (R == Scalar(0)) {
        if (!(H > Scalar(0)))
            throw out_of_range_error("limit_d: degenerate domain");
        return H / 2 - r * r / (2 * H);
    }
    const Scalar peak = theta_max(spec);
    const Scalar c = std::cos(peak);
    const Scalar s = std::sin(peak);
    const Scalar u = H - R * c;
    if (!(u > Scalar(0)))
        throw out_of_range_error("limit_d: degenerate domain, no horizontal motion");
    if (r < R * s * (1 - Scalar(1e-12)))
        throw out_of_range_error("limit_d: radius below the vertex ring R sin(theta_max)");
    return (H + R * c) / 2 - (r * r - R * R * s * s) / (2 * u);
}

} // namespace billiards
