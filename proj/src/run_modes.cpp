#include "billiards/run_modes.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <span>
#include <sstream>

#include <json.hpp>

#include "billiards/circle.hpp"
#include "billiards/domains.hpp"
#include "billiards/oracle.hpp"

namespace billiards {

namespace {

std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw config_error("cannot open output file '" + tmp + "'");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

double canonical(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return lo + (hi - lo) * canonical(rng);
}

std::string default_out(const RunConfig& cfg)
{
    const char* ext = cfg.format == RunConfig::Format::csv ? ".csv" : ".json";
    switch (cfg.mode) {
    case RunConfig::Mode::envelope: return std::string("envelope") + ext;
    default: return std::string("trajectory") + ext;
    }
}

struct DriftReport {
    double h_rel = 0.0;
    double lz_abs = 0.0;
    double r_rel = 0.0;
};

DriftReport drift_report(const SimulationResult<double>& run, const MirrorConfigd& m)
{
    DriftReport report;
    if (run.segments.empty())
        return report;
    const auto ref = conserved(run.segments.front().start, m);
    const double h_scale = std::max(1.0, std::abs(ref.directrix_height));
    const double r_scale = std::max(ref.foci_radius, m.focal_length());
    for (const auto& seg : run.segments) {
        const auto trip = conserved(seg.end, m);
        report.h_rel =
            std::max(report.h_rel, std::abs(trip.directrix_height - ref.directrix_height) / h_scale);
        report.lz_abs = std::max(report.lz_abs, std::abs(trip.angular_momentum - ref.angular_momentum));
        report.r_rel = std::max(report.r_rel, std::abs(trip.foci_radius - ref.foci_radius) / r_scale);
    }
    return report;
}

std::string trajectory_csv(const SimulationResult<double>& run, const MirrorConfigd& m)
{
    std::string out = "bounce_index,t_impact,x,y,z,vx,vy,vz,focus_x,focus_y,focus_z,H,l_z,R\n";
    long index = 0;
    for (const auto& seg : run.segments) {
        const auto trip = conserved(seg.start, m);
        const Vec3d& p = seg.end.position;
        const Vec3d& v = seg.end.velocity;
        out += std::to_string(index++);
        for (double x : {seg.impact_time, p[0], p[1], p[2], v[0], v[1], v[2], seg.focus[0],
                         seg.focus[1], seg.focus[2], trip.directrix_height, trip.angular_momentum,
                         trip.foci_radius}) {
            out += ',';
            out += fmt17(x);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json vec_json(const Vec3d& v)
{
    return {v[0], v[1], v[2]};
}

std::string trajectory_json(const SimulationResult<double>& run, const MirrorConfigd& m)
{
    nlohmann::json doc;
    doc["mirror"] = {{"f_m", m.focal_length()}, {"g", m.gravity()}};
    doc["termination"] = to_string(run.termination);
    auto& rows = doc["segments"] = nlohmann::json::array();
    long index = 0;
    for (const auto& seg : run.segments) {
        const auto trip = conserved(seg.start, m);
        rows.push_back({{"bounce_index", index++},
                        {"t_impact", seg.impact_time},
                        {"position", vec_json(seg.end.position)},
                        {"velocity", vec_json(seg.end.velocity)},
                        {"focus", vec_json(seg.focus)},
                        {"H", trip.directrix_height},
                        {"l_z", trip.angular_momentum},
                        {"R", trip.foci_radius}});
    }
    return doc.dump(2) + "\n";
}

int finish_trajectory_run(const RunConfig& cfg, const SimulationResult<double>& run,
                          const MirrorConfigd& m)
{
    const std::string path = cfg.out.empty() ? default_out(cfg) : cfg.out;
    atomic_write(path, cfg.format == RunConfig::Format::csv ? trajectory_csv(run, m)
                                                            : trajectory_json(run, m));

    const auto drift = drift_report(run, m);
    std::printf("%s: segments=%zu termination=%s out=%s\n", to_string(cfg.mode),
                run.segments.size(), to_string(run.termination), path.c_str());
    std::printf("conserved drift: H_rel=%.3e l_z_abs=%.3e R_rel=%.3e\n", drift.h_rel,
                drift.lz_abs, drift.r_rel);
    if (run.termination != Termination::completed) {
        std::printf("termination cause: %s\n", run.message.c_str());
        return exit_abnormal_termination;
    }
    return exit_ok;
}

} // namespace

ParticleStated random_initial_state(const RunConfig& cfg)
{
    std::mt19937_64 rng(cfg.seed);
    const double f = cfg.focal_length;
    const double v_scale = std::sqrt(cfg.gravity * f);
    const MirrorConfigd m = cfg.mirror();
    while (true) {
        const Vec3d p{uniform(rng, -cfg.box_radius * f, cfg.box_radius * f),
                      uniform(rng, -cfg.box_radius * f, cfg.box_radius * f),
                      uniform(rng, -f, cfg.box_z_max * f)};
        if (boundary_value(p, m) < 1e-3 * f)
            continue;
        const Vec3d v{uniform(rng, -cfg.v_max, cfg.v_max) * v_scale,
                      uniform(rng, -cfg.v_max, cfg.v_max) * v_scale,
                      uniform(rng, -cfg.v_max, cfg.v_max) * v_scale};
        return {p, v};
    }
}

int cmd_simulate(const RunConfig& cfg)
{
    const MirrorConfigd m = cfg.mirror();
    const ParticleStated s0 =
        cfg.position ? ParticleStated{*cfg.position, *cfg.velocity} : random_initial_state(cfg);
    return finish_trajectory_run(cfg, simulate(s0, cfg.n_bounces, m), m);
}

int cmd_circle(const RunConfig& cfg)
{
    const MirrorConfigd m = cfg.mirror();
    const CircleOrbitSpecd spec(*cfg.circle_radius, *cfg.circle_theta);
    const ParticleStated s0 = circle_launch_state(spec, m);
    const auto run = simulate(s0, cfg.n_bounces, m);

    const auto period = classify_orbit(*cfg.circle_theta);
    if (period) {
        bool closed = false;
        double dist = std::numeric_limits<double>::quiet_NaN();
        if (run.segments.size() >= *period) {
            dist = (run.segments[*period - 1].end.position - s0.position).norm();
            closed = dist < 1e-9 * std::max(1.0, spec.radius());
        }
        std::printf("orbit: periodic q=%" PRIu64 " closure=%s dist=%.3e\n", *period,
                    closed ? "yes" : "no", dist);
    } else {
        std::printf("orbit: non-periodic\n");
    }
    return finish_trajectory_run(cfg, run, m);
}

int cmd_envelope(const RunConfig& cfg)
{
    const MirrorConfigd m = cfg.mirror();
    const double H = *cfg.directrix_height;
    const double R = *cfg.foci_radius;
    const double lz = cfg.angular_momentum;

    std::optional<DomainSpecd> spec;
    try {
        spec.emplace(H, R, lz, m);
    } catch (const empty_interval_error&) {
        const DomainSpecd probe(H, R, 0.0, m);
        std::fprintf(stderr, "envelope: l_z^2=%s exceeds J_max=%s: no admissible angle\n",
                     fmt17(lz * lz).c_str(), fmt17(J_max(probe)).c_str());
        return exit_config_error;
    }

    const double r_hi = cfg.r_max ? *cfg.r_max
                                  : std::sqrt(4 * m.focal_length() *
                                              (std::max(H, 0.0) + m.focal_length()));
    const long n = cfg.effective_samples(512);
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        grid[static_cast<std::size_t>(i)] = r_hi * static_cast<double>(i) / (n - 1);

    const auto set = envelope(*spec, std::span<const double>(grid));

    struct Row {
        std::string label;
        double r, z;
    };
    std::vector<Row> rows;
    for (const auto& curve : set.curves)
        for (const auto& s : curve.samples)
            rows.push_back({to_string(curve.label), s[0], s[1]});

    // Closed-form limiting cases for side-by-side comparison, each emitted
    // only where its formula is defined.
    const auto emit = [&](const char* label, auto&& f) {
        for (double r : grid) {
            try {
                rows.push_back({label, r, f(r)});
            } catch (const out_of_range_error&) {
            }
        }
    };
    if (H != R) {
        const DomainSpecd planar(H, R, 0.0, m);
        emit("c_plus", [&](double r) { return limit_c_pm(r, planar).first; });
        emit("c_minus", [&](double r) { return limit_c_pm(r, planar).second; });
    }
    if (lz != 0.0) {
        emit("c_0", [&](double r) {
            const double z = limit_c0(r, *spec);
            if (z > H + R + m.focal_length())
                throw out_of_range_error("off-domain");
            return z;
        });
        const auto band = admissible_theta(*spec);
        if (R > 0.0 && band.width() > 1e-9) {
            const double probe = theta_max(*spec) + band.width() / 4;
            emit("c_tilde_plus", [&](double r) { return limit_c_tilde(r, probe, *spec).first; });
            emit("c_tilde_minus", [&](double r) { return limit_c_tilde(r, probe, *spec).second; });
        }
    }
    emit("d", [&](double r) { return limit_d(r, *spec); });

    const std::string path = cfg.out.empty() ? default_out(cfg) : cfg.out;
    if (cfg.format == RunConfig::Format::csv) {
        std::string out = "label,r,z\n";
        for (const auto& row : rows)
            out += row.label + ',' + fmt17(row.r) + ',' + fmt17(row.z) + '\n';
        atomic_write(path, out);
    } else {
        nlohmann::json doc;
        doc["mirror"] = {{"f_m", m.focal_length()}, {"g", m.gravity()}};
        doc["domain"] = {{"H", H}, {"R", R}, {"l_z", lz}, {"J_max", J_max(*spec)}};
        auto& curves = doc["curves"] = nlohmann::json::array();
        std::string current;
        for (const auto& row : rows) {
            if (row.label != current) {
                curves.push_back({{"label", row.label}, {"samples", nlohmann::json::array()}});
                current = row.label;
            }
            curves.back()["samples"].push_back({row.r, row.z});
        }
        auto& gaps = doc["gaps"] = nlohmann::json::array();
        for (double g : set.gaps)
            gaps.push_back(g);
        atomic_write(path, doc.dump(2) + "\n");
    }

    std::printf("envelope: curves=%zu gaps=%zu J_max=%s out=%s\n", set.curves.size(),
                set.gaps.size(), fmt17(J_max(*spec)).c_str(), path.c_str());
    return exit_ok;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

namespace {

using ReflectFn = std::function<Vec3d(const Vec3d&, const Vec3d&)>;

ReflectFn make_reflect_fn(const MirrorConfigd& m, bool inject_bug)
{
    if (!inject_bug)
        return [m](const Vec3d& p, const Vec3d& v) { return reflect(p, v, m); };
    // Mutation hook: reflect about a miswired normal (x-component sign flip).
    return [m](const Vec3d& p, const Vec3d& v) {
        Vec3d grad = boundary_gradient(p, m);
        grad[0] = -grad[0];
        return specular(v, grad.normalized());
    };
}

struct SuiteResult {
    std::string name;
    bool pass;
    std::string detail;
};

ParticleStated verify_random_state(std::mt19937_64& rng, const RunConfig& cfg)
{
    RunConfig draw = cfg;
    draw.seed = rng();
    return random_initial_state(draw);
}

void run_invariant_suites(const RunConfig& cfg, std::vector<SuiteResult>& results)
{
    const MirrorConfigd m = cfg.mirror();
    const ReflectFn reflect_fn = make_reflect_fn(m, cfg.inject_reflection_bug);
    const long n_states = 10;
    const long n_bounces = std::min<long>(cfg.n_bounces, 1000);

    double foci_dev = 0.0, h_dev = 0.0, lz_dev = 0.0;
    std::string failure;
    std::mt19937_64 rng(cfg.seed);
    try {
        for (long trial = 0; trial < n_states; ++trial) {
            ParticleStated s = verify_random_state(rng, cfg);
            const auto ref = conserved(s, m);
            const double r_scale = std::max(ref.foci_radius, m.focal_length());
            const double h_scale = std::max(1.0, std::abs(ref.directrix_height));
            for (long i = 0; i < n_bounces; ++i) {
                const auto seg = step(s, m);
                foci_dev = std::max(foci_dev,
                                    std::abs(seg.focus.norm() - ref.foci_radius) / r_scale);
                s = {seg.end.position, reflect_fn(seg.end.position, seg.end.velocity)};
                const auto trip = conserved(s, m);
                foci_dev = std::max(foci_dev, std::abs(flight_focus(s, m).norm() -
                                                       ref.foci_radius) /
                                                  r_scale);
                h_dev = std::max(h_dev,
                                 std::abs(trip.directrix_height - ref.directrix_height) / h_scale);
                lz_dev = std::max(lz_dev, std::abs(trip.angular_momentum - ref.angular_momentum));
            }
        }
    } catch (const std::exception& e) {
        failure = e.what();
    }

    const auto detail = [&](double dev) {
        std::string d = "max_dev=" + fmt17(dev);
        if (!failure.empty())
            d += " aborted: " + failure;
        return d;
    };
    results.push_back(
        {"foci-sphere", failure.empty() && foci_dev < 1e-9, detail(foci_dev)});
    results.push_back({"conservation", failure.empty() && h_dev < 1e-9 && lz_dev < 1e-9,
                       "H_rel=" + fmt17(h_dev) + " l_z_abs=" + fmt17(lz_dev) +
                           (failure.empty() ? "" : " aborted: " + failure)});
}

void run_oracle_suite(const RunConfig& cfg, std::vector<SuiteResult>& results)
{
    const MirrorConfigd m = cfg.mirror();
    const auto oracle_cfg = OracleConfigd::scaled(m);
    std::mt19937_64 rng(cfg.seed + 1);
    double worst = 0.0;
    std::string failure;
    try {
        for (int i = 0; i < 20; ++i) {
            const ParticleStated s = verify_random_state(rng, cfg);
            const auto end = fly(s, impact_time(s, m), m);
            const auto hit = oracle_step(s, m, oracle_cfg);
            worst = std::max(worst, (hit.position - end.position).norm());
        }
    } catch (const std::exception& e) {
        failure = e.what();
    }
    results.push_back({"oracle-equivalence", failure.empty() && worst < 1e-6,
                       "max_pos_diff=" + fmt17(worst) +
                           (failure.empty() ? "" : " aborted: " + failure)});
}

void run_containment_suite(const RunConfig& cfg, std::vector<SuiteResult>& results)
{
    const MirrorConfigd m = cfg.mirror();
    std::mt19937_64 rng(cfg.seed + 2);
    const long n_bounces = std::min<long>(cfg.n_bounces, 300);
    const long per_arc = cfg.effective_samples(8);
    double worst = -std::numeric_limits<double>::infinity();
    double worst_wall = 0.0;
    std::string failure;

    try {
        for (int trial = 0; trial < 3; ++trial) {
            const ParticleStated s0 = verify_random_state(rng, cfg);
            const auto trip = conserved(s0, m);

            const double H = trip.directrix_height;
            const double R = trip.foci_radius;

            // Domains with no horizontal phase space (axis-bound motion,
            // J_max at numeric zero) have a line for an envelope; the
            // directrix plane is the only meaningful ceiling there.
            const DomainSpecd probe(H, R, 0.0, m);
            const double jm_scale =
                m.gravity() * std::pow(std::abs(H) + R + m.focal_length(), 3);
            std::optional<DomainSpecd> spec;
            if (J_max(probe) > 1e-18 * jm_scale)
                spec.emplace(H, R, trip.angular_momentum, m);

            // If the admissible band reaches the height evaluator's
            // vertex-speed floor, the family contains near-vertical members
            // that no height function resolves; points in their radius
            // sliver fall back to the z <= H energy bound.
            double degen_r = -1.0, degen_margin = 0.0;
            if (spec) {
                const double u_floor = 1e-14 * std::max(1.0, std::abs(H) + R);
                const auto band = admissible_theta(*spec);
                if (H - R * std::cos(band.lower) <= 100 * u_floor) {
                    degen_r = std::sqrt(std::max(R * R - H * H, 0.0));
                    degen_margin = 2 * std::sqrt(2 * u_floor * R) + 1e3 * u_floor +
                                   1e-9 * (m.focal_length() + R + std::abs(H));
                }
            }

            const auto run = simulate(s0, n_bounces, m);
            for (const auto& seg : run.segments) {
                for (long k = 0; k <= per_arc; ++k) {
                    const auto mid = fly(seg.start, seg.impact_time * k / per_arc, m);
                    double top = H;
                    const double r = std::hypot(mid.position[0], mid.position[1]);
                    const bool on_degenerate_sliver =
                        degen_r >= 0.0 && std::abs(r - degen_r) <= degen_margin;
                    if (spec && !on_degenerate_sliver) {
                        const auto set = envelope(*spec, std::span<const double>(&r, 1));
                        double best = -std::numeric_limits<double>::infinity();
                        for (const auto& curve : set.curves)
                            if (!curve.samples.empty())
                                best = std::max(best, curve.samples.front()[1]);
                        // A point rounding-level below the barrier radius sees
                        // a gap; the directrix plane still bounds it.
                        if (std::isfinite(best))
                            top = best;
                    }
                    worst = std::max(worst, mid.position[2] - top);
                    worst_wall = std::min(worst_wall, boundary_value(mid.position, m));
                }
            }
        }
    } catch (const std::exception& e) {
        failure = e.what();
    }
    results.push_back({"envelope-containment",
                       failure.empty() && worst < 1e-6 && worst_wall > -1e-6,
                       "max_overshoot=" + fmt17(worst) + " min_boundary=" + fmt17(worst_wall) +
                           (failure.empty() ? "" : " aborted: " + failure)});
}

} // namespace

int cmd_verify(const RunConfig& cfg)
{
    std::vector<SuiteResult> results;
    run_invariant_suites(cfg, results);
    run_oracle_suite(cfg, results);
    run_containment_suite(cfg, results);

    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("%s: %s (%s)\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    return all_pass ? exit_ok : exit_verify_failure;
}

int run_mode(const RunConfig& cfg)
{
    try {
        validate(cfg);
        switch (cfg.mode) {
        case RunConfig::Mode::simulate: return cmd_simulate(cfg);
        case RunConfig::Mode::circle: return cmd_circle(cfg);
        case RunConfig::Mode::envelope: return cmd_envelope(cfg);
        case RunConfig::Mode::verify: return cmd_verify(cfg);
        }
        return exit_config_error;
    } catch (const config_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_config_error;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_config_error;
    }
}

} // namespace billiards
