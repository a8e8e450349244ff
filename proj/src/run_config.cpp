#include "billiards/run_config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace billiards {

namespace {

double parse_double(const std::string& key, const std::string& value)
{
    try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size() || !std::isfinite(x))
            throw config_error("config: bad numeric value for '" + key + "': " + value);
        return x;
    } catch (const std::logic_error&) {
        throw config_error("config: bad numeric value for '" + key + "': " + value);
    }
}

long parse_long(const std::string& key, const std::string& value)
{
    try {
        std::size_t pos = 0;
        const long x = std::stol(value, &pos);
        if (pos != value.size())
            throw config_error("config: bad integer value for '" + key + "': " + value);
        return x;
    } catch (const std::logic_error&) {
        throw config_error("config: bad integer value for '" + key + "': " + value);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value)
{
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(value, &pos);
        if (pos != value.size())
            throw config_error("config: bad seed value for '" + key + "': " + value);
        return static_cast<std::uint64_t>(x);
    } catch (const std::logic_error&) {
        throw config_error("config: bad seed value for '" + key + "': " + value);
    }
}

void set_component(std::optional<Vec3d>& v, int i, double x)
{
    if (!v)
        v = Vec3d::Zero();
    (*v)[i] = x;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

} // namespace

void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value)
{
    if (key == "mode") {
        if (value == "simulate")
            cfg.mode = RunConfig::Mode::simulate;
        else if (value == "circle")
            cfg.mode = RunConfig::Mode::circle;
        else if (value == "envelope")
            cfg.mode = RunConfig::Mode::envelope;
        else if (value == "verify")
            cfg.mode = RunConfig::Mode::verify;
        else
            throw config_error("config: unknown mode '" + value + "'");
    } else if (key == "f_m") {
        cfg.focal_length = parse_double(key, value);
    } else if (key == "g") {
        cfg.gravity = parse_double(key, value);
    } else if (key == "x") {
        set_component(cfg.position, 0, parse_double(key, value));
    } else if (key == "y") {
        set_component(cfg.position, 1, parse_double(key, value));
    } else if (key == "z") {
        set_component(cfg.position, 2, parse_double(key, value));
    } else if (key == "vx") {
        set_component(cfg.velocity, 0, parse_double(key, value));
    } else if (key == "vy") {
        set_component(cfg.velocity, 1, parse_double(key, value));
    } else if (key == "vz") {
        set_component(cfg.velocity, 2, parse_double(key, value));
    } else if (key == "h") {
        cfg.directrix_height = parse_double(key, value);
    } else if (key == "r_sphere") {
        cfg.foci_radius = parse_double(key, value);
    } else if (key == "l_z") {
        cfg.angular_momentum = parse_double(key, value);
    } else if (key == "r0") {
        cfg.circle_radius = parse_double(key, value);
    } else if (key == "theta") {
        cfg.circle_theta = parse_double(key, value);
    } else if (key == "n_bounces") {
        cfg.n_bounces = parse_long(key, value);
    } else if (key == "samples") {
        cfg.samples = parse_long(key, value);
    } else if (key == "r_max") {
        cfg.r_max = parse_double(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_u64(key, value);
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "format") {
        if (value == "csv")
            cfg.format = RunConfig::Format::csv;
        else if (value == "json")
            cfg.format = RunConfig::Format::json;
        else
            throw config_error("config: unknown format '" + value + "' (csv|json)");
    } else if (key == "box_radius") {
        cfg.box_radius = parse_double(key, value);
    } else if (key == "box_z_max") {
        cfg.box_z_max = parse_double(key, value);
    } else if (key == "v_max") {
        cfg.v_max = parse_double(key, value);
    } else {
        throw config_error("config: unknown key '" + key + "'");
    }
}

RunConfig parse_config_file(const std::string& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: " + path + ":" + std::to_string(lineno) +
                               ": expected key=value");
        apply_key_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

void validate(const RunConfig& cfg)
{
    if (!(cfg.focal_length > 0) || !(cfg.gravity > 0))
        throw config_error("config: f_m and g must be positive");
    if (cfg.n_bounces < 0)
        throw config_error("config: n_bounces must be non-negative");
    if (cfg.position.has_value() != cfg.velocity.has_value())
        throw config_error("config: initial state needs both position and velocity");

    switch (cfg.mode) {
    case RunConfig::Mode::simulate:
        if (cfg.position &&
            boundary_value(*cfg.position, cfg.mirror()) < -cfg.mirror().boundary_tol())
            throw config_error("config: initial position lies outside the mirror");
        break;
    case RunConfig::Mode::circle:
        if (!cfg.circle_radius || !cfg.circle_theta)
            throw config_error("config: circle mode needs r0 and theta");
        if (!(*cfg.circle_radius > 0))
            throw config_error("config: r0 must be positive");
        if (!(*cfg.circle_theta > 0) || !(*cfg.circle_theta <= std::numbers::pi))
            throw config_error("config: theta must lie in (0, pi]");
        break;
    case RunConfig::Mode::envelope:
        if (!cfg.directrix_height || !cfg.foci_radius)
            throw config_error("config: envelope mode needs h and r_sphere");
        if (!(*cfg.foci_radius >= 0))
            throw config_error("config: r_sphere must be non-negative");
        if (cfg.r_max && !(*cfg.r_max > 0))
            throw config_error("config: r_max must be positive");
        break;
    case RunConfig::Mode::verify:
        break;
    }
}

const char* to_string(RunConfig::Mode mode)
{
    switch (mode) {
    case RunConfig::Mode::simulate: return "simulate";
    case RunConfig::Mode::circle: return "circle";
    case RunConfig::Mode::envelope: return "envelope";
    case RunConfig::Mode::verify: return "verify";
    }
    return "unknown";
}

} // namespace billiards
