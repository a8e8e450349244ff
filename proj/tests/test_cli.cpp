#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "billiards/run_config.hpp"
#include "billiards/run_modes.hpp"

using namespace billiards;

namespace {

namespace fs = std::filesystem;

std::string cli_path()
{
    if (const char* p = std::getenv("BILLIARDS_CLI"))
        return p;
    const fs::path fallback = fs::path("..") / "tools" / "billiards_cli";
    REQUIRE_MESSAGE(fs::exists(fallback),
                    "set BILLIARDS_CLI or run from the build tests directory");
    return fallback.string();
}

int run_cli(const std::string& args, std::string* output = nullptr)
{
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string text;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
        text.append(buf, n);
    const int rc = pclose(pipe);
    if (output)
        *output = text;
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> parse_csv_rows(const std::string& csv)
{
    std::vector<std::vector<double>> rows;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line); // header
    while (std::getline(lines, line)) {
        std::vector<double> row;
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ','))
            row.push_back(std::stod(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

struct Scratch {
    fs::path dir;
    Scratch()
    {
        dir = fs::temp_directory_path() / ("billiards_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

} // namespace

TEST_CASE("config parsing: keys, overrides, failures")
{
    RunConfig cfg;
    apply_key_value(cfg, "f_m", "2.5");
    apply_key_value(cfg, "l_z", "-0.25");
    apply_key_value(cfg, "n_bounces", "42");
    apply_key_value(cfg, "format", "json");
    CHECK(cfg.focal_length == 2.5);
    CHECK(cfg.angular_momentum == -0.25);
    CHECK(cfg.n_bounces == 42);
    CHECK(cfg.format == RunConfig::Format::json);

    CHECK_THROWS_AS(apply_key_value(cfg, "unknown_key", "1"), config_error);
    CHECK_THROWS_AS(apply_key_value(cfg, "g", "fast"), config_error);
    CHECK_THROWS_AS(apply_key_value(cfg, "format", "xml"), config_error);

    Scratch scratch;
    {
        std::ofstream f(scratch.file("run.cfg"));
        f << "# axial drop\nmode = simulate\nx = 0\ny=0\nz = 0\nvx=0\nvy=0\nvz=0\n"
          << "n_bounces = 3\nseed=9\n";
    }
    const RunConfig parsed = parse_config_file(scratch.file("run.cfg"), RunConfig{});
    CHECK(parsed.n_bounces == 3);
    REQUIRE(parsed.position.has_value());
    CHECK((*parsed.position)[2] == 0.0);
    CHECK_NOTHROW(validate(parsed));

    CHECK_THROWS_AS(parse_config_file(scratch.file("missing.cfg"), RunConfig{}), config_error);
}

TEST_CASE("config validation: mode-specific requirements")
{
    RunConfig circle;
    circle.mode = RunConfig::Mode::circle;
    CHECK_THROWS_AS(validate(circle), config_error);
    circle.circle_radius = 2.0;
    circle.circle_theta = 1.0;
    CHECK_NOTHROW(validate(circle));
    circle.circle_theta = 4.0;
    CHECK_THROWS_AS(validate(circle), config_error);

    RunConfig env;
    env.mode = RunConfig::Mode::envelope;
    CHECK_THROWS_AS(validate(env), config_error);
    env.directrix_height = 2.0;
    env.foci_radius = 1.0;
    CHECK_NOTHROW(validate(env));

    RunConfig sim;
    sim.position = Vec3d(0, 0, 10); // above the rim but inside M > 0? z=10,r=0 -> inside
    sim.velocity = Vec3d(0, 0, 0);
    CHECK_NOTHROW(validate(sim));
    sim.position = Vec3d(10, 0, 0); // outside the bowl
    CHECK_THROWS_AS(validate(sim), config_error);
}

TEST_CASE("simulate: axial-drop config gives identical segments and zero drift")
{
    Scratch scratch;
    {
        std::ofstream f(scratch.file("axial.cfg"));
        f << "x=0\ny=0\nz=0\nvx=0\nvy=0\nvz=0\nn_bounces=3\n";
    }
    std::string out;
    const int rc = run_cli("simulate --config " + scratch.file("axial.cfg") + " --out " +
                               scratch.file("axial.csv"),
                           &out);
    CHECK(rc == 0);
    CHECK(out.find("termination=completed") != std::string::npos);
    double h_rel = 1, lz_abs = 1, r_rel = 1;
    REQUIRE(std::sscanf(out.c_str() + out.find("conserved drift:"),
                        "conserved drift: H_rel=%lf l_z_abs=%lf R_rel=%lf", &h_rel, &lz_abs,
                        &r_rel) == 3);
    CHECK(h_rel < 1e-12);
    CHECK(lz_abs < 1e-12);
    CHECK(r_rel < 1e-12);

    const std::string csv = slurp(scratch.file("axial.csv"));
    CHECK(csv.rfind("bounce_index,t_impact,x,y,z,vx,vy,vz,focus_x,focus_y,focus_z,H,l_z,R\n", 0) ==
          0);
    // three vertical arcs, all ending at the apex with the same impact speed
    const auto rows = parse_csv_rows(csv);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK(std::abs(row[2]) < 1e-12);      // x
        CHECK(std::abs(row[3]) < 1e-12);      // y
        CHECK(std::abs(row[4] + 1) < 1e-12);  // z at the apex
        CHECK(std::abs(row[7] - rows[0][7]) < 1e-12); // vz
    }
}

TEST_CASE("simulate: fixed seed reproduces byte-identical CSV")
{
    Scratch scratch;
    const std::string args = "simulate --seed 123 --n-bounces 50 --out ";
    CHECK(run_cli(args + scratch.file("a.csv")) == 0);
    CHECK(run_cli(args + scratch.file("b.csv")) == 0);
    const std::string a = slurp(scratch.file("a.csv"));
    CHECK(a == slurp(scratch.file("b.csv")));
    CHECK(a.find("nan") == std::string::npos);

    CHECK(run_cli("simulate --seed 124 --n-bounces 50 --out " + scratch.file("c.csv")) == 0);
    CHECK(a != slurp(scratch.file("c.csv")));
}

TEST_CASE("circle: period-3 closure flag and non-periodic report")
{
    Scratch scratch;
    std::string out;
    CHECK(run_cli("circle --r0 2 --theta 2.0943951023931953 --n-bounces 3 --out " +
                      scratch.file("p3.csv"),
                  &out) == 0);
    CHECK(out.find("periodic q=3") != std::string::npos);
    CHECK(out.find("closure=yes") != std::string::npos);

    CHECK(run_cli("circle --r0 2 --theta 2.0 --n-bounces 5 --out " + scratch.file("np.csv"),
                  &out) == 0);
    CHECK(out.find("non-periodic") != std::string::npos);

    CHECK(run_cli("circle --r0 2", &out) == 1); // missing theta
}

TEST_CASE("envelope: files carry curve and closed-form labels; JSON parses")
{
    Scratch scratch;
    std::string out;
    CHECK(run_cli("envelope --h 2 --r-sphere 1 --l-z 0.5 --samples 64 --out " +
                      scratch.file("env.csv"),
                  &out) == 0);
    const std::string csv = slurp(scratch.file("env.csv"));
    CHECK(csv.rfind("label,r,z\n", 0) == 0);
    for (const char* label : {"upper", "lower", "inner_barrier", "c_plus", "c_minus", "c_0",
                              "c_tilde_plus", "c_tilde_minus", "d"})
        CHECK(csv.find(std::string(label) + ",") != std::string::npos);

    CHECK(run_cli("envelope --h 2 --r-sphere 1 --format json --out " + scratch.file("env.json"),
                  &out) == 0);
    const auto doc = nlohmann::json::parse(slurp(scratch.file("env.json")));
    CHECK(doc["domain"]["H"] == 2.0);
    CHECK(doc["curves"].size() >= 2);

    // Infeasible angular momentum: diagnostic with the J_max value, exit 1.
    const int rc = run_cli("envelope --h 2 --r-sphere 1 --l-z 1.46", &out);
    CHECK(rc == 1);
    CHECK(out.find("J_max") != std::string::npos);
}

TEST_CASE("verify: clean run passes, injected reflection bug fails foci sphere")
{
    std::string out;
    CHECK(run_cli("verify --seed 5 --n-bounces 300", &out) == 0);
    for (const char* suite : {"foci-sphere", "conservation", "oracle-equivalence",
                              "envelope-containment"})
        CHECK(out.find(std::string(suite) + ": PASS") != std::string::npos);

    CHECK(run_cli("verify --seed 5 --n-bounces 100 --inject-reflection-bug", &out) == 2);
    CHECK(out.find("foci-sphere: FAIL") != std::string::npos);
}

TEST_CASE("verify: degenerate R = 0 axial configuration passes")
{
    Scratch scratch;
    {
        // A box collapsed onto the axis: every random state is axial, foci at the origin.
        std::ofstream f(scratch.file("axial_box.cfg"));
        f << "box_radius=1e-12\nv_max=1e-12\nbox_z_max=0.5\nn_bounces=50\nseed=3\n";
    }
    std::string out;
    CHECK(run_cli("verify --config " + scratch.file("axial_box.cfg"), &out) == 0);
    CHECK(out.find("foci-sphere: PASS") != std::string::npos);
}

TEST_CASE("flags override config-file values")
{
    Scratch scratch;
    {
        std::ofstream f(scratch.file("base.cfg"));
        f << "r0=1\ntheta=3.141592653589793\nn_bounces=2\n";
    }
    std::string out;
    CHECK(run_cli("circle --config " + scratch.file("base.cfg") + " --r0 2 --out " +
                      scratch.file("o.csv"),
                  &out) == 0);
    CHECK(out.find("periodic q=2") != std::string::npos);
    // r0 override shows up in the data: impacts at radius 2.
    const auto rows = parse_csv_rows(slurp(scratch.file("o.csv")));
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows)
        CHECK(std::hypot(row[2], row[3]) == doctest::Approx(2.0).epsilon(1e-12));
}
