#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "billiards/run_config.hpp"
#include "billiards/run_modes.hpp"

using namespace billiards;

namespace {

struct FlagValues {
    std::string config;
    double f_m = 0, g = 0, h = 0, r_sphere = 0, l_z = 0, theta = 0, r0 = 0, r_max = 0;
    long n_bounces = 0, samples = 0;
    std::uint64_t seed = 0;
    std::string out, format;
    bool inject_reflection_bug = false;
};

void add_common_options(CLI::App* sub, FlagValues& fl)
{
    sub->add_option("--config", fl.config, "flat key=value configuration file");
    sub->add_option("--f-m", fl.f_m, "mirror focal length f_M (> 0)");
    sub->add_option("--g", fl.g, "gravitational acceleration (> 0)");
    sub->add_option("--n-bounces", fl.n_bounces, "number of reflections to simulate");
    sub->add_option("--h", fl.h, "directrix height H");
    sub->add_option("--r-sphere", fl.r_sphere, "foci-sphere radius R");
    sub->add_option("--l-z", fl.l_z, "reduced angular momentum l_z");
    sub->add_option("--theta", fl.theta, "circle-orbit step angle in (0, pi]");
    sub->add_option("--r0", fl.r0, "reflection-circle radius");
    sub->add_option("--seed", fl.seed, "PRNG seed for random initial states");
    sub->add_option("--samples", fl.samples, "sampling density (grid points / per-arc samples)");
    sub->add_option("--r-max", fl.r_max, "envelope radius grid upper end");
    sub->add_option("--out", fl.out, "output file path");
    sub->add_option("--format", fl.format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gravitational billiards inside a rotationally symmetric paraboloid mirror"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help and exit"); // keep --h free for the height flag
    FlagValues fl;

    CLI::App* sim = app.add_subcommand("simulate", "event-driven bounce simulation");
    CLI::App* cir = app.add_subcommand("circle", "circle-orbit run from (r0, theta)");
    CLI::App* env = app.add_subcommand("envelope", "confined-domain envelope extraction");
    CLI::App* ver = app.add_subcommand("verify", "invariant verification suites");
    for (CLI::App* sub : {sim, cir, env, ver}) {
        sub->set_help_flag("--help", "print help and exit");
        add_common_options(sub, fl);
    }
    ver->add_flag("--inject-reflection-bug", fl.inject_reflection_bug)->group("");

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();

    RunConfig cfg;
    try {
        if (sub->count("--config"))
            cfg = parse_config_file(fl.config, cfg);
    } catch (const config_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_config_error;
    }

    if (sub == sim)
        cfg.mode = RunConfig::Mode::simulate;
    else if (sub == cir)
        cfg.mode = RunConfig::Mode::circle;
    else if (sub == env)
        cfg.mode = RunConfig::Mode::envelope;
    else
        cfg.mode = RunConfig::Mode::verify;

    if (sub->count("--f-m"))
        cfg.focal_length = fl.f_m;
    if (sub->count("--g"))
        cfg.gravity = fl.g;
    if (sub->count("--n-bounces"))
        cfg.n_bounces = fl.n_bounces;
    if (sub->count("--h"))
        cfg.directrix_height = fl.h;
    if (sub->count("--r-sphere"))
        cfg.foci_radius = fl.r_sphere;
    if (sub->count("--l-z"))
        cfg.angular_momentum = fl.l_z;
    if (sub->count("--theta"))
        cfg.circle_theta = fl.theta;
    if (sub->count("--r0"))
        cfg.circle_radius = fl.r0;
    if (sub->count("--seed"))
        cfg.seed = fl.seed;
    if (sub->count("--samples"))
        cfg.samples = fl.samples;
    if (sub->count("--r-max"))
        cfg.r_max = fl.r_max;
    if (sub->count("--out"))
        cfg.out = fl.out;
    if (sub->count("--format"))
        cfg.format = fl.format == "json" ? RunConfig::Format::json : RunConfig::Format::csv;
    cfg.inject_reflection_bug = fl.inject_reflection_bug;

    return run_mode(cfg);
}
