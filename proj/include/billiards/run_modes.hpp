#pragma once

#include "billiards/dynamics.hpp"
#include "billiards/run_config.hpp"

namespace billiards {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_verify_failure = 2;
inline constexpr int exit_abnormal_termination = 3;

int cmd_simulate(const RunConfig& cfg);
int cmd_circle(const RunConfig& cfg);
int cmd_envelope(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

/// Validates and dispatches; maps config_error to exit_config_error.
int run_mode(const RunConfig& cfg);

/// Seeded rejection sampling of a launch state inside the mirror
/// (bit-stable across platforms for reproducible outputs).
ParticleStated random_initial_state(const RunConfig& cfg);

} // namespace billiards
