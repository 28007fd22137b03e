#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

// Coefficient tuples for the regularized model. The energy-preserving choice
// (B, C) = (2A/3, -A/3), D = 0 makes the cubic terms of the energy balance
// cancel; coupling_beta realizes the beta = c * eps^4 scaling used throughout
// the limit experiments. The appendix_* functions analyse the coefficient
// family A = (C + alpha)^{2n} through the zeros of g(X) = X^{2n} + 3X - 3 alpha.

namespace kslab {

struct KSParams {
    double a_coeff = 0.0;
    double b_coeff = 0.0;
    double c_coeff = 0.0;
    double d_coeff = 0.0;
    double beta = 0.0;  // >= 0
    double eps = 0.0;   // >= 0

    bool energy_preserving() const {
        return std::abs(a_coeff - b_coeff + c_coeff) < 1e-12 &&
               std::abs(b_coeff + 2.0 * c_coeff) < 1e-12 && d_coeff == 0.0;
    }
};

inline std::pair<double, double> energy_preserving_coefficients(double a_coeff) {
    return {2.0 * a_coeff / 3.0, -a_coeff / 3.0};
}

// True iff |A - B + C| and |B + 2C| are both below 1e-12 and D = 0.
inline bool verify_constraint_system(const KSParams& p) { return p.energy_preserving(); }

inline double coupling_beta(double eps, double c_coupling) {
    if (!(eps > 0.0) || !(c_coupling > 0.0))
        throw std::invalid_argument("coupling_beta: eps and coupling constant must be positive");
    const double e2 = eps * eps;  // (eps^2)^2 so halving eps divides beta by 16 exactly
    return c_coupling * (e2 * e2);
}

inline KSParams make_energy_preserving_params(double a_coeff, double eps, double beta) {
    if (eps < 0.0 || beta < 0.0)
        throw std::invalid_argument("make_energy_preserving_params: eps and beta must be nonnegative");
    const auto [b, c] = energy_preserving_coefficients(a_coeff);
    return KSParams{a_coeff, b, c, 0.0, beta, eps};
}

// ---------------------------------------------------------------------------
// The A = (C + alpha)^{2n} family.

struct AppendixProblem {
    int n_exponent = 1;  // >= 1
    double alpha = 0.0;
};

inline double integer_power(double x, unsigned m) {
    double result = 1.0;
    double base = x;
    while (m != 0) {
        if (m & 1u) result *= base;
        base *= base;
        m >>= 1;
    }
    return result;
}

inline double appendix_g(double x, const AppendixProblem& prob) {
    if (prob.n_exponent < 1) throw std::invalid_argument("appendix_g: n must be at least 1");
    return integer_power(x, 2u * unsigned(prob.n_exponent)) + 3.0 * x - 3.0 * prob.alpha;
}

// Global minimizer of g: the unique zero of g'(X) = 2n X^{2n-1} + 3.
inline double appendix_critical_point(const AppendixProblem& prob) {
    const double n2 = 2.0 * double(prob.n_exponent);
    return -std::pow(3.0 / n2, 1.0 / (n2 - 1.0));
}

// g has exactly two real zeros X1 <= X0 <= X2 iff its minimum value is <= 0.
inline bool two_roots_certificate(const AppendixProblem& prob) {
    return appendix_g(appendix_critical_point(prob), prob) <= 0.0;
}

// Smallest alpha admitting real zeros, from g(X0) <= 0 solved for alpha:
//   alpha >= 3^{1/(2n-1)} (1/2n)^{2n/(2n-1)} - (3/2n)^{1/(2n-1)}.
inline double alpha_lower_threshold(int n_exponent) {
    if (n_exponent < 1) throw std::invalid_argument("alpha_lower_threshold: n must be at least 1");
    const double n2 = 2.0 * double(n_exponent);
    const double q = 1.0 / (n2 - 1.0);
    return std::pow(3.0, q) * std::pow(1.0 / n2, n2 * q) - std::pow(3.0 / n2, q);
}

// For A = C^{2n+1} the constraint system reduces to C^{2n} + 3 = 0, whose left
// side never drops below 3; no real coefficient exists.
inline bool odd_exponent_case_solvable(int n_exponent) {
    if (n_exponent < 1) throw std::invalid_argument("odd_exponent_case_solvable: n must be at least 1");
    return false;
}

struct AppendixRoots {
    double x1 = 0.0;  // x1 <= x0 <= x2
    double x2 = 0.0;
    double a_from_x1 = 0.0;  // A = X^{2n} at each zero
    double a_from_x2 = 0.0;
    bool x1_is_boundary = false;  // zero at C = 0, excluded from coefficient construction
    bool x2_is_boundary = false;
};

namespace detail {

// Plain bisection; g(lo) and g(hi) are assumed to bracket (one may be zero).
inline double bisect_g(const AppendixProblem& prob, double lo, double hi) {
    double glo = appendix_g(lo, prob);
    if (glo == 0.0) return lo;
    double ghi = appendix_g(hi, prob);
    if (ghi == 0.0) return hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double gm = appendix_g(mid, prob);
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Both zeros of g, found by geometric bracket expansion away from the
// critical point followed by bisection. Refuses when the certificate fails.
inline AppendixRoots appendix_roots(const AppendixProblem& prob) {
    if (!two_roots_certificate(prob))
        throw std::domain_error("appendix_roots: no certified real zeros for these parameters");
    const double x0 = appendix_critical_point(prob);

    auto expand = [&](double direction) {
        double step = std::max(1.0, std::abs(x0));
        for (int it = 0; it < 1000; ++it) {
            const double cand = x0 + direction * step;
            if (appendix_g(cand, prob) > 0.0) return cand;
            step *= 2.0;
        }
        throw std::runtime_error("appendix_roots: bracket expansion failed");
    };

    const double left = expand(-1.0);
    const double right = expand(+1.0);

    AppendixRoots roots;
    roots.x1 = detail::bisect_g(prob, left, x0);
    roots.x2 = detail::bisect_g(prob, x0, right);
    const unsigned p2n = 2u * unsigned(prob.n_exponent);
    roots.a_from_x1 = integer_power(roots.x1, p2n);
    roots.a_from_x2 = integer_power(roots.x2, p2n);
    const double scale = std::max(1.0, std::abs(x0));
    roots.x1_is_boundary = std::abs(roots.x1) <= 1e-10 * scale;
    roots.x2_is_boundary = std::abs(roots.x2) <= 1e-10 * scale;
    return roots;
}

}  // namespace kslab
