#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gmcf/checkpoint.hpp"
#include "gmcf/config.hpp"
#include "gmcf/density.hpp"
#include "support/oracles.hpp"

using namespace gmcf;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("gmcf_itest_" + std::to_string(::getpid() + rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd =
        std::string(GMCF_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

const std::string kTorusConfig =
    "experiment.kind = torus\n"
    "grid.n = 2\n"
    "grid.m = 2\n"
    "grid.resolution = 16\n"
    "initial.preset = small_sine\n"
    "initial.amplitude = 0.05\n"
    "solver.t_end = 0.05\n"
    "solver.output_every = 0.01\n"
    "solver.checkpoint_every = 0.01\n";

}  // namespace

TEST_CASE("config: parsing, comments, unknown and missing keys") {
    const Config cfg = parse_config_text(
        "# comment\n"
        "experiment.kind = torus   # trailing comment\n"
        "solver.t_end = 2.5\n"
        "\n"
        "verify.levels = 16, 32\n");
    CHECK(cfg.get("experiment.kind") == "torus");
    CHECK(cfg.num("solver.t_end") == 2.5);
    CHECK(cfg.list_or("verify.levels", {}) == std::vector<double>{16.0, 32.0});

    CHECK_THROWS_WITH_AS(parse_config_text("no.such.key = 1\n"),
                         "unknown key: no.such.key", ConfigError);
    try {
        cfg.get("solver.sigma");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()) == "missing key: solver.sigma");
    }
}

TEST_CASE("cli run: torus experiment writes the documented outputs") {
    TempDir tmp;
    write_file(tmp.path / "torus.cfg", kTorusConfig);
    const int rc = run_cli("run --config " + (tmp.path / "torus.cfg").string() +
                               " --out " + (tmp.path / "out").string(),
                           tmp.path / "run.log");
    CHECK(rc == 0);

    const std::string series = slurp(tmp.path / "out" / "time_series.csv");
    // Header echoes the resolved config; fixed column order.
    CHECK(series.find("# experiment.kind = torus") != std::string::npos);
    CHECK(series.find("# solver.sigma = ") != std::string::npos);
    CHECK(series.find("t,dt,min_star_omega,max_star_omega,max_det,"
                      "max_energy_density,max_a2,max_h2,total_volume,"
                      "max_velocity") != std::string::npos);
    CHECK(fs::exists(tmp.path / "out" / "checkpoint_final.txt"));
    CHECK(fs::exists(tmp.path / "out" / "checkpoint_000000.txt"));

    // min_star_omega column is monotone up to the discrete tolerance.
    std::istringstream ss(series);
    std::string line;
    double prev = -1.0;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        std::istringstream ls(line);
        std::string tok;
        for (int c = 0; c < 3; ++c) std::getline(ls, tok, ',');
        const double v = std::stod(tok);
        if (prev >= 0) CHECK(v >= prev - 10.0 * (1.0 / 16) * (1.0 / 16) * 0.05);
        prev = v;
    }
}

TEST_CASE("cli run: bit-identical outputs across repeated runs and thread counts") {
    TempDir tmp;
    write_file(tmp.path / "torus.cfg", kTorusConfig);
    const std::string cfg = (tmp.path / "torus.cfg").string();
    REQUIRE(run_cli("run --config " + cfg + " --out " + (tmp.path / "a").string(),
                    tmp.path / "a.log") == 0);
    REQUIRE(run_cli("run --config " + cfg + " --out " + (tmp.path / "b").string(),
                    tmp.path / "b.log") == 0);
    REQUIRE(run_cli("run --config " + cfg + " --out " + (tmp.path / "c").string() +
                        " --threads 2",
                    tmp.path / "c.log") == 0);
    const std::string a = slurp(tmp.path / "a" / "time_series.csv");
    const std::string b = slurp(tmp.path / "b" / "time_series.csv");
    std::string c = slurp(tmp.path / "c" / "time_series.csv");
    CHECK(a == b);
    // The c series differs only in the echoed thread count.
    const auto pos = c.find("solver.threads = 2");
    REQUIRE(pos != std::string::npos);
    c.replace(pos, 18, "solver.threads = 1");
    CHECK(a == c);
    CHECK(slurp(tmp.path / "a" / "checkpoint_final.txt") ==
          slurp(tmp.path / "c" / "checkpoint_final.txt"));
}

TEST_CASE("cli run: missing required key exits 1 with the key named") {
    TempDir tmp;
    write_file(tmp.path / "bad.cfg",
               "experiment.kind = torus\n"
               "grid.n = 2\n"
               "grid.m = 2\n"
               "grid.resolution = 16\n"
               "initial.preset = small_sine\n");
    const int rc = run_cli("run --config " + (tmp.path / "bad.cfg").string() +
                               " --out " + (tmp.path / "out").string(),
                           tmp.path / "run.log");
    CHECK(rc == 1);
    CHECK(slurp(tmp.path / "run.log").find("missing key: solver.t_end") !=
          std::string::npos);
}

TEST_CASE("cli run: sphere experiment emits the extended columns") {
    TempDir tmp;
    write_file(tmp.path / "sph.cfg",
               "experiment.kind = sphere_equivariant\n"
               "grid.n = 2\n"
               "grid.resolution = 32\n"
               "initial.preset = half_sine_sphere\n"
               "initial.amplitude = 0.5\n"
               "solver.t_end = 0.2\n"
               "solver.output_every = 0.05\n");
    const int rc = run_cli("run --config " + (tmp.path / "sph.cfg").string() +
                               " --out " + (tmp.path / "out").string(),
                           tmp.path / "run.log");
    CHECK(rc == 0);
    const std::string series = slurp(tmp.path / "out" / "time_series.csv");
    CHECK(series.find("max_lambda,max_abs_psi") != std::string::npos);
    CHECK(checkpoint_kind((tmp.path / "out" / "checkpoint_final.txt").string()) ==
          CheckpointKind::sphere_equivariant);
}

TEST_CASE("cli verify: default geometry suite passes, mutation fixture fails") {
    TempDir tmp;
    write_file(tmp.path / "v.cfg",
               "verify.samples = 500\n"
               "verify.suites = geometry\n");
    CHECK(run_cli("verify --config " + (tmp.path / "v.cfg").string() + " --out " +
                      (tmp.path / "out").string(),
                  tmp.path / "v.log") == 0);
    CHECK(slurp(tmp.path / "out" / "verify_report.txt").find("status=PASS") !=
          std::string::npos);

    write_file(tmp.path / "m.cfg",
               "verify.samples = 500\n"
               "verify.suites = geometry\n"
               "verify.mutation = curvature_sign\n");
    CHECK(run_cli("verify --config " + (tmp.path / "m.cfg").string() + " --out " +
                      (tmp.path / "mout").string(),
                  tmp.path / "m.log") == 3);
    CHECK(slurp(tmp.path / "mout" / "verify_report.txt").find("status=FAIL") !=
          std::string::npos);
}

TEST_CASE("cli monitor: smooth run regular, fixtures and error paths") {
    TempDir tmp;
    write_file(tmp.path / "torus.cfg", kTorusConfig);
    REQUIRE(run_cli("run --config " + (tmp.path / "torus.cfg").string() + " --out " +
                        (tmp.path / "out").string(),
                    tmp.path / "run.log") == 0);

    // Regular probe on the final graph. Checkpoints span t in [0, 0.05];
    // t0 = 0.055 keeps the kernel resolved on the N=16 grid at the last
    // sample while the t0 - t values still span a decade.
    const int rc = run_cli(
        "monitor --checkpoints '" + (tmp.path / "out" / "checkpoint_0*.txt").string() +
            "' " + (tmp.path / "out" / "checkpoint_final.txt").string() +
            " --y0 graph:0.25,0.25 --t0 0.055 --out " + (tmp.path / "mon").string(),
        tmp.path / "mon.log");
    CHECK(rc == 0);
    const std::string log = slurp(tmp.path / "mon" / "probe_log.csv");
    CHECK(log.find("t,t0_minus_t,density,extrapolated_limit,flag") !=
          std::string::npos);
    CHECK(log.find("regular") != std::string::npos);

    // t0 before the checkpoint times: input error.
    CHECK(run_cli("monitor --checkpoints '" +
                      (tmp.path / "out" / "checkpoint_*.txt").string() +
                      "' --y0 graph:0.25,0.25 --t0 0.0 --out " +
                      (tmp.path / "mon2").string(),
                  tmp.path / "mon2.log") == 1);

    // Synthetic shrinking-sphere fixture: suspicious (exit 4).
    const double t0 = 0.5;
    int idx = 0;
    for (double tau : {2e-2, 8e-3, 2e-3}) {
        const auto cloud =
            oracles::sphere_cloud(2, std::sqrt(4.0 * tau), 96, t0 - tau);
        write_cloud_file(
            (tmp.path / ("shrink_" + std::to_string(idx++) + ".txt")).string(), cloud);
    }
    CHECK(run_cli("monitor --checkpoints '" + (tmp.path / "shrink_*.txt").string() +
                      "' --y0 0,0,0 --t0 0.5 --epsilon 0.05 --out " +
                      (tmp.path / "mon3").string(),
                  tmp.path / "mon3.log") == 4);
    CHECK(slurp(tmp.path / "mon3" / "probe_log.csv").find("suspicious") !=
          std::string::npos);
}
