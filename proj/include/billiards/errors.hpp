#pragma once

#include <stdexcept>
#include <string>

namespace billiards {

/// Forward impact root exists but lies below the grazing tolerance:
/// the velocity at the boundary is tangential to machine precision.
struct grazing_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No positive impact root. Cannot occur for interior states with finite
/// energy; signals a corrupted or outside-the-mirror state.
struct no_impact_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// l_z^2 exceeds J_max: no admissible polar angle, no motion exists.
struct empty_interval_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operation undefined for a zero-radius foci sphere.
struct degenerate_sphere_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the operation's validity region (r < r_min,
/// inadmissible angle, radius off the flight surface interval, ...).
struct out_of_range_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct max_steps_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace billiards
