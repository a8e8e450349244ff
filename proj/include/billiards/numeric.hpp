#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

namespace billiards {

/// Real roots of a*t^2 + b*t + c = 0, a != 0, as (t_low, t_high).
/// Uses the q-form (q = -(b + sign(b)*sqrt(disc))/2, roots q/a and c/q)
/// so the smaller-magnitude root keeps full precision even when c ~ 0.
template <typename Scalar>
std::optional<std::pair<Scalar, Scalar>> quadratic_roots(Scalar a, Scalar b, Scalar c)
{
    const Scalar disc = b * b - 4 * a * c;
    if (disc < Scalar(0))
        return std::nullopt;
    const Scalar sq = std::sqrt(disc);
    const Scalar q = -(b + std::copysign(sq, b)) / 2;
    Scalar r1 = q / a;
    Scalar r2 = (q != Scalar(0)) ? c / q : -b / a - r1;
    if (r1 > r2)
        std::swap(r1, r2);
    return std::make_pair(r1, r2);
}

/// Root of a continuous f on [lo, hi] assuming sign(f(lo)) != sign(f(hi)).
/// Plain bisection to absolute x-tolerance.
template <typename Scalar, typename F>
Scalar bisect_root(F&& f, Scalar lo, Scalar hi, Scalar x_tol)
{
    Scalar flo = f(lo);
    for (int i = 0; i < 200 && (hi - lo) > x_tol; ++i) {
        const Scalar mid = (lo + hi) / 2;
        const Scalar fm = f(mid);
        if ((flo <= Scalar(0)) == (fm <= Scalar(0))) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return (lo + hi) / 2;
}

template <typename Scalar>
struct ScalarExtremum {
    Scalar x;
    Scalar value;
};

/// Golden-section maximization of f on [lo, hi] to x-tolerance.
/// Endpoint values are kept in play so boundary maxima are not lost.
template <typename Scalar, typename F>
ScalarExtremum<Scalar> golden_max(F&& f, Scalar lo, Scalar hi, Scalar x_tol)
{
    constexpr Scalar inv_phi = Scalar(0.6180339887498948482);
    Scalar a = lo, b = hi;
    Scalar x1 = b - inv_phi * (b - a);
    Scalar x2 = a + inv_phi * (b - a);
    Scalar f1 = f(x1), f2 = f(x2);
    while (b - a > x_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    ScalarExtremum<Scalar> best{(a + b) / 2, f((a + b) / 2)};
    for (Scalar x : {lo, hi}) {
        const Scalar fx = f(x);
        if (fx > best.value)
            best = {x, fx};
    }
    return best;
}

/// Scan-then-refine maximization: n-point scan picks the best cell,
/// golden-section polishes inside the bracketing pair of cells.
template <typename Scalar, typename F>
ScalarExtremum<Scalar> scan_golden_max(F&& f, Scalar lo, Scalar hi, int n, Scalar x_tol)
{
    if (!(hi > lo))
        return {lo, f(lo)};
    int ibest = 0;
    Scalar fbest = -std::numeric_limits<Scalar>::infinity();
    for (int i = 0; i < n; ++i) {
        const Scalar x = lo + (hi - lo) * Scalar(i) / Scalar(n - 1);
        const Scalar fx = f(x);
        if (fx > fbest) {
            fbest = fx;
            ibest = i;
        }
    }
    const Scalar h = (hi - lo) / Scalar(n - 1);
    const Scalar a = std::max(lo, lo + h * Scalar(ibest - 1));
    const Scalar b = std::min(hi, lo + h * Scalar(ibest + 1));
    return golden_max(f, a, b, x_tol);
}

} // namespace billiards
