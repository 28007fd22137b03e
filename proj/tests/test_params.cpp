#include "doctest.h"

#include <cmath>
#include <random>

#include "kslab/params.hpp"

using namespace kslab;

TEST_CASE("energy preserving coefficients") {
    {
        const auto [b, c] = energy_preserving_coefficients(1.0);
        CHECK(b == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(c == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
    }
    {
        const auto [b, c] = energy_preserving_coefficients(0.0);
        CHECK(b == 0.0);
        CHECK(c == 0.0);
    }
    {
        const auto [b, c] = energy_preserving_coefficients(9.0);
        CHECK(b == 6.0);
        CHECK(c == -3.0);
    }
}

TEST_CASE("constraint system verification") {
    CHECK(verify_constraint_system(KSParams{1.0, 2.0 / 3.0, -1.0 / 3.0, 0.0, 0.0, 0.0}));
    CHECK_FALSE(verify_constraint_system(KSParams{1.0, 1.0, 1.0, 0.0, 0.0, 0.0}));
    CHECK(verify_constraint_system(KSParams{9.0, 6.0, -3.0, 0.0, 0.0, 0.0}));
    CHECK_FALSE(verify_constraint_system(KSParams{1.0, 2.0 / 3.0, -1.0 / 3.0, 0.5, 0.0, 0.0}));

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-100.0, 100.0);
    for (int i = 0; i < 200; ++i) {
        const double a = dist(rng);
        const auto [b, c] = energy_preserving_coefficients(a);
        CHECK(verify_constraint_system(KSParams{a, b, c, 0.0, 0.0, 0.0}));
    }
}

TEST_CASE("quartic coupling") {
    CHECK(coupling_beta(0.1, 1.0) == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(coupling_beta(0.05, 1.0) == doctest::Approx(6.25e-6).epsilon(1e-14));

    // halving eps divides beta by exactly 16 (powers of two scale exactly)
    for (double eps : {0.2, 0.12, 0.07}) {
        CHECK(coupling_beta(eps / 2.0, 1.0) == coupling_beta(eps, 1.0) / 16.0);
    }
    CHECK_THROWS_AS(coupling_beta(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(coupling_beta(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("appendix polynomial evaluation") {
    CHECK(appendix_g(0.0, {1, 0.0}) == 0.0);
    CHECK(appendix_g(-3.0, {1, 0.0}) == 0.0);
    CHECK(appendix_g(1.0, {2, 1.0}) == 1.0);
}

TEST_CASE("two roots certificate") {
    CHECK(two_roots_certificate({1, 0.0}));   // g(-1.5) = -2.25
    CHECK(two_roots_certificate({1, 1.0}));   // g(-1.5) = -5.25
    CHECK_FALSE(two_roots_certificate({1, -1.0}));  // g(-1.5) = 0.75
}

TEST_CASE("appendix roots against closed forms") {
    {
        const auto r = appendix_roots({1, 0.0});
        CHECK(r.x1 == doctest::Approx(-3.0).epsilon(1e-12));
        CHECK(std::abs(r.x2) < 1e-10);
        CHECK(r.x2_is_boundary);
        CHECK(r.a_from_x1 == doctest::Approx(9.0).epsilon(1e-12));
    }
    {
        const auto r = appendix_roots({1, 1.0});
        CHECK(r.x1 == doctest::Approx((-3.0 - std::sqrt(21.0)) / 2.0).epsilon(1e-12));
        CHECK(r.x2 == doctest::Approx((-3.0 + std::sqrt(21.0)) / 2.0).epsilon(1e-12));
        CHECK_FALSE(r.x1_is_boundary);
        CHECK_FALSE(r.x2_is_boundary);
    }
    {
        const auto r = appendix_roots({2, 0.0});
        CHECK(r.x1 == doctest::Approx(-std::cbrt(3.0)).epsilon(1e-12));
        CHECK(std::abs(r.x2) < 1e-10);
    }
    CHECK_THROWS_AS(appendix_roots({1, -1.0}), std::domain_error);
}

TEST_CASE("root residuals and monotonicity beyond the minimum") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> alpha_dist(-0.7, 3.0);
    std::uniform_int_distribution<int> n_dist(1, 4);
    int certified = 0;
    for (int i = 0; i < 200; ++i) {
        const AppendixProblem prob{n_dist(rng), alpha_dist(rng)};
        if (!two_roots_certificate(prob)) continue;
        ++certified;
        const auto r = appendix_roots(prob);
        const double tol = 1e-12 * (1.0 + std::abs(3.0 * prob.alpha));
        CHECK(std::abs(appendix_g(r.x1, prob)) < tol);
        CHECK(std::abs(appendix_g(r.x2, prob)) < tol);
        CHECK(r.x1 <= appendix_critical_point(prob) + 1e-14);
        CHECK(r.x2 >= appendix_critical_point(prob) - 1e-14);

        // g strictly increases on a sampled mesh right of the minimum
        const double x0 = appendix_critical_point(prob);
        double prev = appendix_g(x0, prob);
        for (int m = 1; m <= 100; ++m) {
            const double cur = appendix_g(x0 + 0.1 * double(m), prob);
            CHECK(cur > prev);
            prev = cur;
        }
    }
    CHECK(certified > 100);
}

TEST_CASE("odd exponent family has no real coefficient") {
    for (int n = 1; n <= 4; ++n) {
        CHECK_FALSE(odd_exponent_case_solvable(n));
        // mesh scan oracle: C^{2n} + 3 stays at or above its analytic floor 3
        double min_seen = std::numeric_limits<double>::infinity();
        for (double c = -10.0; c <= 10.0; c += 0.01)
            min_seen = std::min(min_seen, integer_power(c, 2u * unsigned(n)) + 3.0);
        CHECK(min_seen >= 3.0);
    }
}

TEST_CASE("A = C^2 tuple closes the loop with the constraint system") {
    const auto r = appendix_roots({1, 0.0});
    const double a = r.a_from_x1;  // 9, from C = -3
    const auto [b, c] = energy_preserving_coefficients(a);
    CHECK(verify_constraint_system(KSParams{a, b, c, 0.0, 0.0, 0.0}));
    CHECK(c == doctest::Approx(r.x1).epsilon(1e-12));  // C = -A/3 = -3 is the root itself
}

TEST_CASE("certificate matches the closed-form threshold on a dense scan") {
    for (int n : {1, 2, 3}) {
        const double threshold = alpha_lower_threshold(n);
        for (int i = -300; i <= 300; ++i) {
            const double alpha = double(i) / 100.0;
            const bool cert = two_roots_certificate({n, alpha});
            CHECK(cert == (alpha >= threshold));
        }
    }
}
