#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "karman/cli.hpp"

using namespace karman;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("karman_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::vector<std::string>& args, std::string* out = nullptr) {
    std::ostringstream os, es;
    int rc = cli::run(args, os, es);
    if (out) *out = os.str() + es.str();
    return rc;
}

const char* kTinyConfig = R"(
[kernel]
kind = euler
[geometry]
l = 1.0
h = 1.0
a = 0.0
[numerics]
N = 6
M = 32
eps = 0.02
eps_target = 0.02
steps = 10
K = 10
threads = 1
)";

}  // namespace

TEST_CASE("config parsing", "[cli]") {
    RunConfig c = parse_config(kTinyConfig);
    CHECK(c.kind == KernelKind::euler_log);
    CHECK(c.N == 6);
    CHECK(c.geom.h == 1.0);

    CHECK_THROWS_AS(parse_config("[kernel]\nkind = euler\nwhatever = 3\n"), config_error);
    CHECK_THROWS_AS(parse_config("[kernel]\nkind = vortex\n"), config_error);
    CHECK_THROWS_AS(parse_config("[geometry]\nl = abc\n"), config_error);
    CHECK_THROWS_AS(parse_config("[numerics]\nN = 10\nM = 16\n"), config_error);  // M < 4N
    CHECK_THROWS_AS(parse_config("key_without_equals\n"), config_error);

    // round trip through the canonical serialization
    RunConfig d = parse_config(serialize_config(c));
    CHECK(serialize_config(d) == serialize_config(c));
}

TEST_CASE("cli basics and exit codes", "[cli]") {
    TempDir tmp("basics");
    fs::path cfg = tmp.path / "run.cfg";
    cli::write_file(cfg, kTinyConfig);

    SECTION("missing config file") {
        CHECK(run_cli({"point-speed", "--config", (tmp.path / "nope.cfg").string()}) == 2);
    }
    SECTION("unknown subcommand / arguments") {
        CHECK(run_cli({"frobnicate", "--config", cfg.string()}) == 2);
        CHECK(run_cli({"point-speed", "--wat"}) == 2);
        CHECK(run_cli({}) == 2);
    }
    SECTION("point-speed writes table and resolved config") {
        fs::path out = tmp.path / "out";
        REQUIRE(run_cli({"point-speed", "--config", cfg.string(), "--out", out.string()}) == 0);
        CHECK(fs::exists(out / "speeds.csv"));
        CHECK(fs::exists(out / "resolved.cfg"));
        std::string csv = slurp(out / "speeds.csv");
        CHECK(csv.rfind("method,re_v,im_v,K", 0) == 0);
        CHECK(csv.find("closed_form") != std::string::npos);
    }
    SECTION("convergence failure maps to exit 3") {
        std::string hard(kTinyConfig);
        hard += "tol_newton = 1e-30\n";
        // parse places the key in no section -> rejected; append properly
        hard = std::string(kTinyConfig);
        hard.insert(hard.find("[numerics]") + std::string("[numerics]\n").size(),
                    "tol_newton = 1e-30\n");
        fs::path cfg2 = tmp.path / "hard.cfg";
        cli::write_file(cfg2, hard);
        CHECK(run_cli({"sweep-epsilon", "--config", cfg2.string(), "--out",
                       (tmp.path / "out3").string()}) == 3);
    }
}

TEST_CASE("cli solve and downstream outputs", "[cli][.slow]") {
    TempDir tmp("solve");
    fs::path cfg = tmp.path / "run.cfg";
    std::string text(kTinyConfig);
    text += "[field]\nx0 = -0.5\nx1 = 0.5\ny0 = -1.5\ny1 = 0.5\nnx = 4\nny = 4\n";
    cli::write_file(cfg, text);

    fs::path out = tmp.path / "out";
    REQUIRE(run_cli({"solve-street", "--config", cfg.string(), "--out", out.string()}) == 0);
    CHECK(fs::exists(out / "solution.txt"));
    CHECK(fs::exists(out / "contour.csv"));
    CHECK(fs::exists(out / "contour.svg"));
    CHECK(fs::exists(out / "field.csv"));
    StreetSolution sol = parse_solution(slurp(out / "solution.txt"));
    CHECK(sol.eps == 0.02);
    CHECK(sol.residual_norm < 1e-11);
    CHECK(slurp(out / "field.csv").rfind("x,y,u,v", 0) == 0);

    fs::path out2 = tmp.path / "out_sweep";
    REQUIRE(run_cli({"sweep-epsilon", "--config", cfg.string(), "--out", out2.string()}) == 0);
    CHECK(fs::exists(out2 / "branch.csv"));
    CHECK(fs::exists(out2 / "records.txt"));
    CHECK(fs::exists(out2 / "V_curve.svg"));

    fs::path out3 = tmp.path / "out_pts";
    REQUIRE(run_cli({"simulate-points", "--config", cfg.string(), "--out", out3.string()}) == 0);
    std::string traj = slurp(out3 / "trajectory.csv");
    CHECK(traj.rfind("t,point_index,row,re,im", 0) == 0);

    fs::path out4 = tmp.path / "out_lin";
    REQUIRE(run_cli({"lin-check", "--config", cfg.string(), "--out", out4.string()}) == 0);
    CHECK(fs::exists(out4 / "lin_check.csv"));

    fs::path out5 = tmp.path / "out_bessel";
    REQUIRE(run_cli({"bessel-check", "--config", cfg.string(), "--out", out5.string()}) == 0);
    CHECK(fs::exists(out5 / "bessel_check.csv"));
}

TEST_CASE("byte-identical reruns", "[cli]") {
    TempDir tmp("determinism");
    fs::path cfg = tmp.path / "run.cfg";
    cli::write_file(cfg, kTinyConfig);
    for (const std::string sub : {"point-speed", "lin-check"}) {
        fs::path o1 = tmp.path / (sub + "_1"), o2 = tmp.path / (sub + "_2");
        REQUIRE(run_cli({sub, "--config", cfg.string(), "--out", o1.string()}) == 0);
        REQUIRE(run_cli({sub, "--config", cfg.string(), "--out", o2.string()}) == 0);
        for (const auto& entry : fs::directory_iterator(o1)) {
            fs::path rel = entry.path().filename();
            CAPTURE(sub, rel.string());
            CHECK(slurp(entry.path()) == slurp(o2 / rel));
        }
    }
}
