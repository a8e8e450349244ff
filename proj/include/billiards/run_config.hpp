#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "billiards/mirror.hpp"

namespace billiards {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One resolved CLI invocation: defaults, overlaid by the key=value config
/// file, overlaid by command-line flags.
struct RunConfig {
    enum class Mode { simulate, circle, envelope, verify };
    enum class Format { csv, json };

    Mode mode = Mode::simulate;
    double focal_length = 1.0;
    double gravity = 1.0;

    // simulate: explicit initial state (both or neither; random otherwise)
    std::optional<Vec3d> position;
    std::optional<Vec3d> velocity;

    // envelope: confined-domain parameters
    std::optional<double> directrix_height;
    std::optional<double> foci_radius;
    double angular_momentum = 0.0;

    // circle: reflection-circle parameters
    std::optional<double> circle_radius;
    std::optional<double> circle_theta;

    long n_bounces = 100;
    long samples = 0; ///< 0 = per-mode default (envelope grid size / verify arc sampling)
    std::optional<double> r_max;

    std::uint64_t seed = 1;
    std::string out;
    Format format = Format::csv;

    // random-state bounding box, in units of f and sqrt(g f)
    double box_radius = 2.0;
    double box_z_max = 1.0;
    double v_max = 1.5;

    bool inject_reflection_bug = false; ///< verify-only mutation hook

    MirrorConfigd mirror() const { return {focal_length, gravity}; }
    long effective_samples(long fallback) const { return samples > 0 ? samples : fallback; }
};

/// Applies one config-file/flag key. Throws config_error for unknown keys or
/// unparsable values.
void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Reads a flat key=value file ('#' comments, blank lines allowed) on top of
/// the given base configuration.
RunConfig parse_config_file(const std::string& path, RunConfig base);

/// Mode-specific completeness/sanity checks. Throws config_error.
void validate(const RunConfig& cfg);

const char* to_string(RunConfig::Mode mode);

} // namespace billiards
