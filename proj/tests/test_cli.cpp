#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "kslab/cli.hpp"

using namespace kslab;
namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
    std::vector<const char*> argv;
    argv.push_back("kslab");
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::dispatch(int(argv.size()), argv.data());
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("kslab_cli_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p;
}

const char* kSimulateConfig = R"(version = 1

[grid]
half_length = 8
n_points = 256

[params]
a = 1.0
eps = 0.05

[datum]
kind = gaussian
amplitude = 1.0
width = 1.0

[solver]
t_final = 0.25
snapshot_times = 0.125, 0.25
)";

}  // namespace

TEST_CASE("params subcommand") {
    CHECK(run_cli({"params", "--a", "1"}) == 0);
    CHECK(run_cli({"params", "--a", "9", "--n", "1", "--alpha", "0"}) == 0);
    CHECK(run_cli({"params"}) == 2);  // nothing requested
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli({"frobnicate"}) == 2);
    CHECK(run_cli({"limit", "--config", "/missing/config.txt"}) == 2);
    CHECK(run_cli({"simulate"}) == 2);  // --config required
    CHECK(run_cli({"--version"}) == 0);
}

TEST_CASE("simulate then check-estimates round trip") {
    TempDir tmp;
    const fs::path cfg = write_file(tmp.path, "run.cfg", kSimulateConfig);
    const fs::path out = tmp.path / "run_out";
    CHECK(run_cli({"simulate", "--config", cfg.string(), "--out", out.string()}) == 0);
    CHECK(fs::exists(out / "invariants.csv"));
    CHECK(fs::exists(out / "steplog.csv"));
    CHECK(fs::exists(out / "snap_0000.csv"));
    CHECK(fs::exists(out / "params.csv"));

    // a smooth dissipative run passes every estimate check
    CHECK(run_cli({"check-estimates", "--run", out.string()}) == 0);
    CHECK(fs::exists(out / "estimates.csv"));

    // snapshot CSVs round-trip exactly
    const Trajectory reloaded = io::load_run_dir(out);
    const Trajectory direct = [&] {
        const RunConfig rc = parse_config(cfg.string());
        return simulate(*rc.datum, *rc.params, *rc.solver, *rc.grid);
    }();
    REQUIRE(reloaded.snapshots.size() == direct.snapshots.size());
    for (std::size_t m = 0; m < reloaded.snapshots.size(); ++m) {
        const Field& a = reloaded.snapshots[m].second;
        const Field& b = direct.snapshots[m].second;
        for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
    }
    for (std::size_t i = 0; i < reloaded.step_log.size(); ++i) {
        CHECK(reloaded.step_log[i].l2 == direct.step_log[i].l2);
        CHECK(reloaded.step_log[i].ux_uxx_l1 == direct.step_log[i].ux_uxx_l1);
    }
}

TEST_CASE("check-estimates passes on a conservative eps = 0 run") {
    TempDir tmp;
    const fs::path cfg = write_file(tmp.path, "run.cfg", R"(version = 1

[grid]
half_length = 16
n_points = 512

[params]
a = 1.0
eps = 0

[datum]
kind = gaussian
amplitude = 1.0
width = 2.0

[solver]
t_final = 0.5
snapshot_times = 0.5
max_dt = 0.002
)");
    const fs::path out = tmp.path / "cons_out";
    CHECK(run_cli({"simulate", "--config", cfg.string(), "--out", out.string()}) == 0);
    CHECK(run_cli({"check-estimates", "--run", out.string()}) == 0);
}

TEST_CASE("burgers subcommand with entropy battery") {
    TempDir tmp;
    const fs::path cfg = write_file(tmp.path, "run.cfg", R"(version = 1

[grid]
half_length = 8
n_points = 1024

[params]
a = 1.0

[datum]
kind = riemann_step
u_left = 1
u_right = 0
support_radius = 4

[solver]
t_final = 1.0
snapshot_times = 0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2, 0.22, 0.24, 0.26, 0.28, 0.3, 0.32, 0.34, 0.36, 0.38, 0.4, 0.42, 0.44, 0.46, 0.48, 0.5, 0.52, 0.54, 0.56, 0.58, 0.6, 0.62, 0.64, 0.66, 0.68, 0.7, 0.72, 0.74, 0.76, 0.78, 0.8, 0.82, 0.84, 0.86, 0.88, 0.9, 0.92, 0.94, 0.96, 0.98, 1.0

[entropy]
pairs = square, kruzhkov
kruzhkov_k = 0.5
phi_count = 3
)");
    const fs::path out = tmp.path / "burgers_out";
    CHECK(run_cli({"burgers", "--config", cfg.string(), "--out", out.string()}) == 0);
    CHECK(fs::exists(out / "entropy_report.csv"));
}

TEST_CASE("limit subcommand writes the sweep artifacts") {
    TempDir tmp;
    const fs::path cfg = write_file(tmp.path, "run.cfg", R"(version = 1

[grid]
half_length = 8
n_points = 512

[params]
a = 1.0

[datum]
kind = riemann_step
u_left = 1
u_right = 0
support_radius = 4

[solver]
t_final = 0.6

[sweep]
eps_sequence = 0.2, 0.1, 0.05
window_t_min = 0.3
window_t_max = 0.6
window_x_min = -1.5
window_x_max = 1.5
refinement = 4
window_snapshots = 7
)");
    const fs::path out = tmp.path / "limit_out";
    CHECK(run_cli({"limit", "--config", cfg.string(), "--out", out.string(), "--jobs", "2"}) == 0);
    CHECK(fs::exists(out / "convergence.csv"));
    CHECK(fs::exists(out / "orders.csv"));
    CHECK(fs::exists(out / "run_000" / "invariants.csv"));

    const csv::Table conv = csv::read((out / "convergence.csv").string());
    REQUIRE(conv.rows.size() == 3);
    // L1 errors strictly decreasing down the table
    const std::size_t e1 = 2;  // eps, beta, error_p1, ...
    CHECK(conv.rows[1][e1] < conv.rows[0][e1]);
    CHECK(conv.rows[2][e1] < conv.rows[1][e1]);
}

TEST_CASE("KSLAB_OUT provides the default output root") {
    TempDir tmp;
    const fs::path cfg = write_file(tmp.path, "run.cfg", kSimulateConfig);
    setenv("KSLAB_OUT", tmp.path.c_str(), 1);
    CHECK(run_cli({"simulate", "--config", cfg.string()}) == 0);
    unsetenv("KSLAB_OUT");
    CHECK(fs::exists(tmp.path / "simulate_out" / "invariants.csv"));
}

TEST_CASE("csv values round-trip exactly") {
    TempDir tmp;
    csv::Table t;
    t.header = {"x", "u"};
    t.rows.push_back({-0.1, 1.0 / 3.0});
    t.rows.push_back({2.0 / 7.0, -1e-17});
    t.rows.push_back({1e300, 0.1 + 0.2});
    const fs::path p = tmp.path / "roundtrip.csv";
    csv::write(p.string(), t);
    const csv::Table back = csv::read(p.string());
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t j = 0; j < t.rows[i].size(); ++j)
            CHECK(back.rows[i][j] == t.rows[i][j]);
}
