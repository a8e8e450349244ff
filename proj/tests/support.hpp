#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "billiards/domains.hpp"
#include "billiards/dynamics.hpp"
#include "billiards/mirror.hpp"

namespace billiards::test {

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3d random_vec(std::mt19937_64& rng, double lo, double hi)
{
    return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

/// Rejection-sampled state strictly inside the mirror, with a margin so the
/// first flight is a genuine arc.
inline ParticleStated random_interior_state(std::mt19937_64& rng, const MirrorConfigd& m,
                                            double box = 2.0, double v_max = 1.5)
{
    const double f = m.focal_length();
    while (true) {
        const Vec3d p{uniform(rng, -box * f, box * f), uniform(rng, -box * f, box * f),
                      uniform(rng, -f, box * f)};
        if (boundary_value(p, m) < 1e-3 * f)
            continue;
        return {p, random_vec(rng, -v_max, v_max) * std::sqrt(m.gravity() * f)};
    }
}

/// Piecewise-linear read-off of an envelope curve, clamped to its end samples.
struct EnvelopeInterp {
    std::vector<double> r;
    std::vector<double> z;

    explicit EnvelopeInterp(const EnvelopeCurved& curve)
    {
        r.reserve(curve.samples.size());
        z.reserve(curve.samples.size());
        for (const auto& s : curve.samples) {
            r.push_back(s[0]);
            z.push_back(s[1]);
        }
    }

    double operator()(double x) const
    {
        if (r.empty())
            return std::numeric_limits<double>::quiet_NaN();
        if (x <= r.front())
            return z.front();
        if (x >= r.back())
            return z.back();
        const auto it = std::upper_bound(r.begin(), r.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - r.begin());
        const double w = (x - r[i - 1]) / (r[i] - r[i - 1]);
        return z[i - 1] * (1 - w) + z[i] * w;
    }
};

inline std::vector<double> linspace(double lo, double hi, int n)
{
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return out;
}

inline const EnvelopeCurved& find_curve(const EnvelopeSet<double>& set,
                                        EnvelopeCurved::Label label)
{
    for (const auto& c : set.curves)
        if (c.label == label)
            return c;
    throw std::runtime_error("curve label not present in envelope set");
}

} // namespace billiards::test
