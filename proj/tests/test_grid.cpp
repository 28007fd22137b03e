#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "kslab/grid.hpp"

using namespace kslab;
namespace nums = std::numbers;

namespace {

// Random band-limited field: modes up to max_mode with decaying amplitudes.
Field random_smooth_field(const Grid& g, std::mt19937& rng, std::size_t max_mode) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> a(max_mode + 1), b(max_mode + 1);
    for (std::size_t m = 0; m <= max_mode; ++m) {
        const double decay = 1.0 / (1.0 + double(m) * double(m));
        a[m] = coef(rng) * decay;
        b[m] = coef(rng) * decay;
    }
    return sample(g, [&](double x) {
        double s = a[0];
        for (std::size_t m = 1; m <= max_mode; ++m) {
            const double k = nums::pi * double(m) / g.half_length;
            s += a[m] * std::cos(k * x) + b[m] * std::sin(k * x);
        }
        return s;
    });
}

}  // namespace

TEST_CASE("make_grid spacing and validation") {
    const Grid g1 = make_grid(nums::pi, 16);
    CHECK(g1.spacing == doctest::Approx(2.0 * nums::pi / 16.0).epsilon(1e-15));
    const Grid g2 = make_grid(50.0, 4096);
    CHECK(g2.spacing == doctest::Approx(100.0 / 4096.0).epsilon(1e-15));
    CHECK(g2.node(0) == -50.0);

    CHECK_THROWS_AS(make_grid(1.0, 10), std::invalid_argument);    // not a power of two
    CHECK_THROWS_AS(make_grid(1.0, 8), std::invalid_argument);     // too small
    CHECK_THROWS_AS(make_grid(-1.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(0.0, 64), std::invalid_argument);
}

TEST_CASE("spectral derivative of trigonometric fields") {
    // modest node count: the k^3 multiplier amplifies transform roundoff in
    // the empty high modes, so the tightest oracle comparison uses N = 32
    const Grid g = make_grid(nums::pi, 32);
    const Field s = sample(g, [](double x) { return std::sin(x); });

    const Field d1 = spectral_derivative(s, 1);
    const Field d3 = spectral_derivative(s, 3);
    double e1 = 0.0, e3 = 0.0;
    for (std::size_t j = 0; j < g.n_points; ++j) {
        e1 = std::max(e1, std::abs(d1[j] - std::cos(g.node(j))));
        e3 = std::max(e3, std::abs(d3[j] + std::cos(g.node(j))));
    }
    CHECK(e1 < 1e-12);
    CHECK(e3 < 1e-12);

    const Field c = sample(g, [](double) { return 5.0; });
    for (int order : {1, 2, 3}) {
        const Field d = spectral_derivative(c, order);
        for (std::size_t j = 0; j < g.n_points; ++j) CHECK(std::abs(d[j]) < 1e-13);
    }

    CHECK_THROWS_AS(spectral_derivative(s, 0), std::invalid_argument);
    CHECK_THROWS_AS(spectral_derivative(s, 4), std::invalid_argument);
}

TEST_CASE("spectral derivative is linear and composes") {
    const Grid g = make_grid(3.0, 128);
    std::mt19937 rng(77);
    const Field f = random_smooth_field(g, rng, g.n_points / 3);
    const Field h = random_smooth_field(g, rng, g.n_points / 3);
    const double alpha = 0.7, beta = -1.3;

    Field combo(g);
    for (std::size_t j = 0; j < g.n_points; ++j) combo[j] = alpha * f[j] + beta * h[j];
    const Field dc = spectral_derivative(combo, 1);
    const Field df = spectral_derivative(f, 1);
    const Field dh = spectral_derivative(h, 1);
    for (std::size_t j = 0; j < g.n_points; ++j)
        CHECK(std::abs(dc[j] - alpha * df[j] - beta * dh[j]) < 1e-12);

    // D applied twice vs D^2
    const Field d2 = spectral_derivative(f, 2);
    const Field dd = spectral_derivative(df, 1);
    for (std::size_t j = 0; j < g.n_points; ++j) CHECK(std::abs(d2[j] - dd[j]) < 1e-8);

    // exact derivatives integrate to zero
    CHECK(std::abs(integral(df)) < 1e-12);
    CHECK(std::abs(integral(spectral_derivative(h, 3))) < 1e-12);
}

TEST_CASE("norms of reference fields") {
    const Grid g = make_grid(nums::pi, 64);
    const Field z(g);
    for (auto kind : {NormKind::l1, NormKind::l2, NormKind::l4, NormKind::linf})
        CHECK(norm(z, kind) == 0.0);

    const Field s = sample(g, [](double x) { return std::sin(x); });
    CHECK(std::abs(norm(s, NormKind::l2) - std::sqrt(nums::pi)) < 1e-12);
    CHECK(std::abs(norm(s, NormKind::l4) - std::pow(3.0 * nums::pi / 4.0, 0.25)) < 1e-10);
    CHECK(norm(s, NormKind::linf) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("norm L2 satisfies discrete Parseval") {
    const Grid g = make_grid(2.5, 128);
    std::mt19937 rng(11);
    const Field f = random_smooth_field(g, rng, g.n_points / 3);
    const auto hat = fft::forward(f.values);
    double spectral = 0.0;
    for (const auto& z : hat) spectral += std::norm(z);
    spectral *= g.spacing / double(g.n_points);
    const double direct = norm(f, NormKind::l2);
    CHECK(std::abs(direct * direct - spectral) < 1e-10);
}

TEST_CASE("product_integral") {
    // kinked integrand |sin cos|: rectangle-rule error is O(h^2), so use a
    // large node count for the closed-form comparison
    const Grid g = make_grid(nums::pi, 131072);
    const Field s = sample(g, [](double x) { return std::sin(x); });
    const Field c = sample(g, [](double x) { return std::cos(x); });
    CHECK(std::abs(product_integral(std::vector<Field>{s, c}) - 2.0) < 1e-8);

    const Grid gs = make_grid(nums::pi, 64);
    const Field ss = sample(gs, [](double x) { return std::sin(x); });
    const Field zz(gs);
    CHECK(product_integral(std::vector<Field>{ss, zz}) == 0.0);
    CHECK(std::abs(product_integral(std::vector<Field>{ss}) - norm(ss, NormKind::l1)) < 1e-14);

    const Grid other = make_grid(2.0, 64);
    const Field of(other);
    CHECK_THROWS_AS(product_integral(std::vector<Field>{ss, of}), std::invalid_argument);
    CHECK_THROWS_AS(product_integral(std::vector<Field>{}), std::invalid_argument);
}

TEST_CASE("mollify: step midpoint, approximate identity, linearity") {
    const Grid g = make_grid(8.0, 512);
    const InitialDatum stepd{RiemannStepDatum{1.0, 0.0, 0.0, 4.0}, 0.05};
    const Field m = mollify(stepd, g);
    CHECK(std::abs(m[g.n_points / 2] - 0.5) < 1e-6);  // node at x = 0
    CHECK(std::abs(integral(m) - integral(detail::sample_raw(stepd, g))) < 1e-12);

    // narrowing widths approach the already-smooth datum monotonically in L2
    const InitialDatum gauss{GaussianDatum{1.0, 0.8, 0.0}, 0.0};
    const Field raw = detail::sample_raw(gauss, g);
    double prev = std::numeric_limits<double>::infinity();
    for (double w : {0.4, 0.2, 0.1, 0.05}) {
        InitialDatum d = gauss;
        d.mollification_width = w;
        const Field mm = mollify(d, g);
        Field diff(g);
        for (std::size_t j = 0; j < g.n_points; ++j) diff[j] = mm[j] - raw[j];
        const double dist = norm(diff, NormKind::l2);
        CHECK(dist < prev);
        prev = dist;
    }

    const InitialDatum zero{CustomDatum{[](double) { return 0.0; }}, 0.1};
    const Field z = mollify(zero, g);
    for (std::size_t j = 0; j < g.n_points; ++j) CHECK(z[j] == 0.0);

    CHECK_THROWS_AS(mollify(InitialDatum{GaussianDatum{1.0, 3.0, 0.0}, 0.1},
                            make_grid(nums::pi, 64)),
                    std::domain_error);  // support reaches the boundary
    CHECK_THROWS_AS(mollify(InitialDatum{GaussianDatum{1.0, 0.5, 0.0}, 0.0}, g),
                    std::invalid_argument);  // width must be positive
}

TEST_CASE("interpolation inequality holds on random fields") {
    const Grid g = make_grid(4.0, 128);
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const Field f = random_smooth_field(g, rng, g.n_points / 3);
        double maxsq = 0.0, minsq = std::numeric_limits<double>::infinity();
        for (double v : f.values) {
            maxsq = std::max(maxsq, v * v);
            minsq = std::min(minsq, v * v);
        }
        const double rhs = minsq + 2.0 * norm(f, NormKind::l2) *
                                       norm(spectral_derivative(f, 1), NormKind::l2);
        CHECK(maxsq <= rhs + 1e-10);
    }
}
