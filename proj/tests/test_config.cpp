#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "kslab/config.hpp"

using namespace kslab;
namespace fs = std::filesystem;

namespace {

struct TempConfig {
    fs::path path;
    explicit TempConfig(const std::string& text) {
        static int counter = 0;
        path = fs::temp_directory_path() / ("kslab_cfg_" + std::to_string(counter++) + ".txt");
        std::ofstream out(path);
        out << text;
    }
    ~TempConfig() { std::error_code ec; fs::remove(path, ec); }
};

const char* kMinimalSimulate = R"(version = 1

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
t_final = 0.5
snapshot_times = 0.25, 0.5
)";

}  // namespace

TEST_CASE("minimal simulate config parses with documented defaults") {
    TempConfig cfg(kMinimalSimulate);
    const RunConfig rc = parse_config(cfg.path.string());
    CHECK(rc.version == 1);
    REQUIRE(rc.grid.has_value());
    REQUIRE(rc.params.has_value());
    REQUIRE(rc.datum.has_value());
    REQUIRE(rc.solver.has_value());
    CHECK(rc.solver->cfl_advective == 0.5);
    CHECK(rc.solver->dealias_fraction == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(rc.params->eps == 0.05);
    CHECK(rc.params->beta == coupling_beta(0.05, 1.0));  // default quartic coupling
    CHECK(rc.params->energy_preserving());
}

TEST_CASE("sweep p = 4 is rejected") {
    TempConfig cfg(std::string(kMinimalSimulate) + R"(
[sweep]
eps_sequence = 0.2, 0.1, 0.05
window_t_min = 0.25
window_t_max = 0.5
window_x_min = -2
window_x_max = 2
p_exponents = 1, 2, 4
)");
    bool threw = false;
    try {
        parse_config(cfg.path.string());
    } catch (const ConfigError& e) {
        threw = true;
        bool mentions_p = false;
        for (const auto& msg : e.errors)
            if (msg.find("p_exponents") != std::string::npos) mentions_p = true;
        CHECK(mentions_p);
    }
    CHECK(threw);
}

TEST_CASE("eps = 0 with positive beta is rejected") {
    TempConfig cfg(R"(version = 1
[params]
a = 1.0
eps = 0
beta = 0.001
)");
    CHECK_THROWS_AS(parse_config(cfg.path.string()), ConfigError);
}

TEST_CASE("unknown keys and sections are rejected, all errors reported") {
    TempConfig cfg(R"(version = 1
[grid]
half_length = 8
n_points = 256
mystery_knob = 3

[params]
a = 1.0
eps = -0.5

[weird_section]
x = 1
)");
    try {
        parse_config(cfg.path.string());
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.errors.size() >= 3);  // unknown key, bad eps, unknown section
    }
}

TEST_CASE("version is mandatory and checked") {
    {
        TempConfig cfg("[grid]\nhalf_length = 8\nn_points = 256\n");
        CHECK_THROWS_AS(parse_config(cfg.path.string()), ConfigError);
    }
    {
        TempConfig cfg("version = 2\n");
        CHECK_THROWS_AS(parse_config(cfg.path.string()), ConfigError);
    }
}

TEST_CASE("missing file is a config error") {
    CHECK_THROWS_AS(parse_config("/nonexistent/kslab.cfg"), ConfigError);
}

TEST_CASE("grid validation propagates through the parser") {
    TempConfig cfg(R"(version = 1
[grid]
half_length = 8
n_points = 100
)");
    CHECK_THROWS_AS(parse_config(cfg.path.string()), ConfigError);  // not a power of two
}

TEST_CASE("riemann step datum section") {
    TempConfig cfg(R"(version = 1
[datum]
kind = riemann_step
u_left = 1
u_right = 0
support_radius = 4
mollification_width = 0.05
)");
    const RunConfig rc = parse_config(cfg.path.string());
    REQUIRE(rc.datum.has_value());
    const auto* d = std::get_if<RiemannStepDatum>(&rc.datum->kind);
    REQUIRE(d != nullptr);
    CHECK(d->left_value == 1.0);
    CHECK(d->right_value == 0.0);
    CHECK(rc.datum->mollification_width == 0.05);
}
