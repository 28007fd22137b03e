#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

// Entropy / entropy-flux pairs for the flux A u^2 / 2, with
// q(u) = integral_0^u A xi eta'(xi) d xi, plus smooth compactly supported
// space-time test functions.

namespace kslab {

enum class EntropyKind { square, kruzhkov_smoothed, compact_bump };

namespace detail {

// Flux table on a uniform mesh, filled by per-cell Simpson quadrature refined
// until convergence and evaluated with cubic Hermite interpolation (the exact
// derivative q'(u) = A u eta'(u) is available at the nodes).
class FluxTable {
public:
    FluxTable(std::function<double(double)> integrand, double u_min, double u_max,
              std::size_t n_cells)
        : integrand_(std::move(integrand)), u_min_(u_min), h_((u_max - u_min) / double(n_cells)) {
        values_.resize(n_cells + 1, 0.0);
        // index of u = 0 (the anchor q(0) = 0); mesh is built so this is exact
        anchor_ = std::size_t(std::llround(-u_min_ / h_));
        for (std::size_t i = anchor_; i < n_cells; ++i)
            values_[i + 1] = values_[i] + cell_integral(node(i), node(i + 1));
        for (std::size_t i = anchor_; i > 0; --i)
            values_[i - 1] = values_[i] - cell_integral(node(i - 1), node(i));
    }

    double operator()(double u) const {
        const double s = (u - u_min_) / h_;
        if (s <= 0.0) return values_.front() + tail(u, node(0));
        const std::size_t last = values_.size() - 1;
        if (s >= double(last)) return values_.back() + tail(u, node(last));
        const std::size_t i = std::size_t(s);
        const double x = s - double(i);
        const double f0 = values_[i], f1 = values_[i + 1];
        const double d0 = h_ * integrand_(node(i)), d1 = h_ * integrand_(node(i + 1));
        const double x2 = x * x, x3 = x2 * x;
        return (2 * x3 - 3 * x2 + 1) * f0 + (x3 - 2 * x2 + x) * d0 +
               (-2 * x3 + 3 * x2) * f1 + (x3 - x2) * d1;
    }

private:
    double node(std::size_t i) const { return u_min_ + double(i) * h_; }

    double cell_integral(double a, double b) const {
        auto simpson = [&](std::size_t n) {
            const double hh = (b - a) / double(n);
            double s = integrand_(a) + integrand_(b);
            for (std::size_t j = 1; j < n; ++j)
                s += integrand_(a + double(j) * hh) * ((j % 2) ? 4.0 : 2.0);
            return s * hh / 3.0;
        };
        double prev = simpson(4);
        for (std::size_t n = 8; n <= 256; n *= 2) {
            const double cur = simpson(n);
            if (std::abs(cur - prev) <= 1e-13 * (1.0 + std::abs(cur))) return cur;
            prev = cur;
        }
        return prev;
    }

    // fallback outside the tabulated range
    double tail(double u, double from) const {
        if (u == from) return 0.0;
        const double lo = std::min(from, u), hi = std::max(from, u);
        const double sign = (u > from) ? 1.0 : -1.0;
        return sign * cell_integral(lo, hi);
    }

    std::function<double(double)> integrand_;
    double u_min_;
    double h_;
    std::size_t anchor_ = 0;
    std::vector<double> values_;
};

}  // namespace detail

struct EntropyPair {
    EntropyKind kind = EntropyKind::square;
    double a_coeff = 1.0;
    std::function<double(double)> eta;
    std::function<double(double)> eta_prime;
    std::function<double(double)> eta_second;
    std::function<double(double)> q;

    std::string kind_name() const {
        switch (kind) {
            case EntropyKind::square: return "square";
            case EntropyKind::kruzhkov_smoothed: return "kruzhkov_smoothed";
            case EntropyKind::compact_bump: return "compact_bump";
        }
        return "?";
    }
};

inline EntropyPair make_square_entropy(double a_coeff) {
    EntropyPair p;
    p.kind = EntropyKind::square;
    p.a_coeff = a_coeff;
    p.eta = [](double u) { return u * u; };
    p.eta_prime = [](double u) { return 2.0 * u; };
    p.eta_second = [](double) { return 2.0; };
    p.q = [a_coeff](double u) { return 2.0 * a_coeff * u * u * u / 3.0; };  // closed form
    return p;
}

// |u - k| smoothed at scale delta: eta(u) = sqrt((u-k)^2 + delta^2) - delta.
inline EntropyPair make_kruzhkov_entropy(double a_coeff, double k, double delta,
                                         double table_range = 16.0) {
    if (!(delta > 0.0)) throw std::invalid_argument("make_kruzhkov_entropy: delta must be positive");
    EntropyPair p;
    p.kind = EntropyKind::kruzhkov_smoothed;
    p.a_coeff = a_coeff;
    p.eta = [k, delta](double u) {
        const double d = u - k;
        return std::sqrt(d * d + delta * delta) - delta;
    };
    p.eta_prime = [k, delta](double u) {
        const double d = u - k;
        return d / std::sqrt(d * d + delta * delta);
    };
    p.eta_second = [k, delta](double u) {
        const double d = u - k;
        const double r = std::sqrt(d * d + delta * delta);
        return delta * delta / (r * r * r);
    };
    auto integrand = [a_coeff, ep = p.eta_prime](double xi) { return a_coeff * xi * ep(xi); };
    auto table = std::make_shared<detail::FluxTable>(integrand, -table_range, table_range, 4096);
    p.q = [table](double u) { return (*table)(u); };
    return p;
}

// C-infinity bump exp(-1/(1-s^2)) on |s| < 1, s = (u - center)/radius.
inline EntropyPair make_bump_entropy(double a_coeff, double center, double radius,
                                     double table_range = 16.0) {
    if (!(radius > 0.0)) throw std::invalid_argument("make_bump_entropy: radius must be positive");
    EntropyPair p;
    p.kind = EntropyKind::compact_bump;
    p.a_coeff = a_coeff;
    auto s_of = [center, radius](double u) { return (u - center) / radius; };
    p.eta = [s_of](double u) {
        const double s = s_of(u);
        const double d = 1.0 - s * s;
        return (d > 1e-12) ? std::exp(-1.0 / d) : 0.0;
    };
    p.eta_prime = [s_of, radius](double u) {
        const double s = s_of(u);
        const double d = 1.0 - s * s;
        if (d <= 1e-12) return 0.0;
        return std::exp(-1.0 / d) * (-2.0 * s / (d * d)) / radius;
    };
    p.eta_second = [s_of, radius](double u) {
        const double s = s_of(u);
        const double d = 1.0 - s * s;
        if (d <= 1e-12) return 0.0;
        const double gp = -2.0 * s / (d * d);
        const double gpp = -2.0 / (d * d) - 8.0 * s * s / (d * d * d);
        return std::exp(-1.0 / d) * (gp * gp + gpp) / (radius * radius);
    };
    auto integrand = [a_coeff, ep = p.eta_prime](double xi) { return a_coeff * xi * ep(xi); };
    auto table = std::make_shared<detail::FluxTable>(integrand, -table_range, table_range, 4096);
    p.q = [table](double u) { return (*table)(u); };
    return p;
}

// ---------------------------------------------------------------------------
// Separable test functions phi(t, x) = scale * tau(t) * chi(x) built from the
// standard smooth bump; compact support is strict by construction.

namespace detail {

inline double bump(double s) {
    const double d = 1.0 - s * s;
    return (d > 1e-12) ? std::exp(-1.0 / d) : 0.0;
}

inline double bump_derivative(double s) {
    const double d = 1.0 - s * s;
    if (d <= 1e-12) return 0.0;
    return std::exp(-1.0 / d) * (-2.0 * s / (d * d));
}

}  // namespace detail

struct TestFunction {
    double t_center = 0.5, t_radius = 0.25;
    double x_center = 0.0, x_radius = 1.0;
    double scale = 1.0;

    bool nonnegative() const { return scale >= 0.0; }

    double value(double t, double x) const {
        return scale * detail::bump((t - t_center) / t_radius) *
               detail::bump((x - x_center) / x_radius);
    }
    double dt(double t, double x) const {
        return scale * detail::bump_derivative((t - t_center) / t_radius) / t_radius *
               detail::bump((x - x_center) / x_radius);
    }
    double dx(double t, double x) const {
        return scale * detail::bump((t - t_center) / t_radius) *
               detail::bump_derivative((x - x_center) / x_radius) / x_radius;
    }
};

}  // namespace kslab
