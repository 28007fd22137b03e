#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "kslab/fft.hpp"

// Uniform periodic grid on [-L, L), grid functions, spectral calculus, norms
// and mollified initial data. Everything here is a pure function of its
// inputs; values are safe to share read-only across threads.

namespace kslab {

struct Grid {
    double half_length = 0.0;   // domain is [-half_length, half_length)
    std::size_t n_points = 0;   // power of two, >= 16
    double spacing = 0.0;       // 2 * half_length / n_points

    double node(std::size_t j) const { return -half_length + double(j) * spacing; }

    // Signed integer mode for spectrum index m (m in [0, n_points)).
    long signed_mode(std::size_t m) const {
        return (m <= n_points / 2) ? long(m) : long(m) - long(n_points);
    }

    // Physical wavenumber of spectrum index m.
    double wavenumber(std::size_t m) const {
        return std::numbers::pi * double(signed_mode(m)) / half_length;
    }

    friend bool operator==(const Grid&, const Grid&) = default;
};

inline Grid make_grid(double half_length, std::size_t n_points) {
    if (!(half_length > 0.0))
        throw std::invalid_argument("make_grid: half_length must be positive");
    if (n_points < 16 || !fft::is_pow2(n_points))
        throw std::invalid_argument("make_grid: n_points must be a power of two, at least 16");
    return Grid{half_length, n_points, 2.0 * half_length / double(n_points)};
}

struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), values(g.n_points, 0.0) {}
    Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.n_points)
            throw std::invalid_argument("Field: value count does not match grid");
    }

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t j) { return values[j]; }
    double operator[](std::size_t j) const { return values[j]; }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

template <class F>
inline Field sample(const Grid& g, F&& f) {
    Field out(g);
    for (std::size_t j = 0; j < g.n_points; ++j) out[j] = f(g.node(j));
    return out;
}

// ---------------------------------------------------------------------------
// Quadrature and norms (rectangle rule; spectrally accurate for smooth
// periodic integrands).

inline double integral(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * f.grid.spacing;
}

enum class NormKind { l1, l2, l4, linf };

inline double norm(const Field& f, NormKind which) {
    switch (which) {
        case NormKind::linf: {
            double m = 0.0;
            for (double v : f.values) m = std::max(m, std::abs(v));
            return m;
        }
        case NormKind::l1: {
            double s = 0.0;
            for (double v : f.values) s += std::abs(v);
            return s * f.grid.spacing;
        }
        case NormKind::l2: {
            double s = 0.0;
            for (double v : f.values) s += v * v;
            return std::sqrt(s * f.grid.spacing);
        }
        case NormKind::l4: {
            double s = 0.0;
            for (double v : f.values) {
                const double v2 = v * v;
                s += v2 * v2;
            }
            return std::pow(s * f.grid.spacing, 0.25);
        }
    }
    throw std::invalid_argument("norm: unknown kind");
}

// Quadrature of the pointwise product of |f_i| over the common grid.
inline double product_integral(std::span<const Field> fields) {
    if (fields.empty()) throw std::invalid_argument("product_integral: no fields");
    const Grid& g = fields.front().grid;
    for (const Field& f : fields)
        if (!(f.grid == g)) throw std::invalid_argument("product_integral: grid mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < g.n_points; ++j) {
        double p = 1.0;
        for (const Field& f : fields) p *= std::abs(f[j]);
        s += p;
    }
    return s * g.spacing;
}

inline double product_integral(const std::vector<Field>& fields) {
    return product_integral(std::span<const Field>(fields.data(), fields.size()));
}

// ---------------------------------------------------------------------------
// Spectral differentiation of the trigonometric interpolant. The Nyquist mode
// is zeroed for odd orders (its odd derivative is not representable as a real
// signal); even orders keep it with the real multiplier -k^2.

inline Field spectral_derivative(const Field& f, int order) {
    if (order < 1 || order > 3)
        throw std::invalid_argument("spectral_derivative: order must be 1, 2 or 3");
    const Grid& g = f.grid;
    auto hat = fft::forward(f.values);
    const std::size_t nyquist = g.n_points / 2;
    for (std::size_t m = 0; m < g.n_points; ++m) {
        const double k = g.wavenumber(m);
        if (order == 2) {
            hat[m] *= -k * k;
        } else if (m == nyquist) {
            hat[m] = 0.0;
        } else if (order == 1) {
            hat[m] *= fft::cplx(0.0, k);
        } else {  // order == 3
            hat[m] *= fft::cplx(0.0, -k * k * k);
        }
    }
    return Field(g, fft::inverse_real(std::move(hat)));
}

// ---------------------------------------------------------------------------
// Initial data. A Riemann step is realized with compact support: the left
// state occupies [-support_radius, 0), the right state [0, support_radius),
// zero outside, so the datum is square- and fourth-power integrable on the
// line the periodic domain stands in for. Sampling uses the midpoint value at
// exact jump nodes (the Fourier-series convention).

struct RiemannStepDatum {
    double left_value = 0.0;
    double right_value = 0.0;
    double transition_width = 0.0;  // tanh edge width of the raw samples; 0 = sharp
    double support_radius = 4.0;
};

struct GaussianDatum {
    double amplitude = 1.0;
    double width = 1.0;
    double center = 0.0;
};

struct CustomDatum {
    std::function<double(double)> sample;
};

struct InitialDatum {
    std::variant<RiemannStepDatum, GaussianDatum, CustomDatum> kind;
    double mollification_width = 0.0;  // <= 0 means "caller resolves a default"
};

namespace detail {

inline double raw_sample(const RiemannStepDatum& d, double x) {
    const double s = d.support_radius;
    if (d.transition_width > 0.0) {
        const double w = d.transition_width;
        auto edge = [w](double xx, double a, double b) {
            return 0.5 * (std::tanh((xx - a) / w) - std::tanh((xx - b) / w));
        };
        return d.left_value * edge(x, -s, 0.0) + d.right_value * edge(x, 0.0, s);
    }
    if (x < -s || x > s) return 0.0;
    if (x == -s) return 0.5 * d.left_value;
    if (x == s) return 0.5 * d.right_value;
    if (x == 0.0) return 0.5 * (d.left_value + d.right_value);
    return (x < 0.0) ? d.left_value : d.right_value;
}

inline double raw_sample(const GaussianDatum& d, double x) {
    const double s = (x - d.center) / d.width;
    return d.amplitude * std::exp(-0.5 * s * s);
}

inline Field sample_raw(const InitialDatum& datum, const Grid& g) {
    return std::visit(
        [&](const auto& d) -> Field {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, CustomDatum>) {
                if (!d.sample) throw std::invalid_argument("InitialDatum: custom sampler is empty");
                return sample(g, d.sample);
            } else {
                return sample(g, [&](double x) { return raw_sample(d, x); });
            }
        },
        datum.kind);
}

}  // namespace detail

// Periodic convolution with a Gaussian of standard deviation
// `mollification_width`, applied as the Fourier multiplier exp(-k^2 w^2 / 2).
// The mean is preserved exactly (unit multiplier at k = 0). The raw samples
// must vanish on the outermost 4 widths next to the boundary.
inline Field mollify(const InitialDatum& datum, const Grid& g) {
    const double w = datum.mollification_width;
    if (!(w > 0.0)) throw std::invalid_argument("mollify: mollification_width must be positive");

    Field raw = detail::sample_raw(datum, g);

    double amax = 0.0;
    for (double v : raw.values) amax = std::max(amax, std::abs(v));
    const double margin = g.half_length - 4.0 * w;
    if (margin <= 0.0) throw std::domain_error("mollify: mollification width too large for domain");
    for (std::size_t j = 0; j < g.n_points; ++j) {
        if (std::abs(g.node(j)) >= margin && std::abs(raw[j]) > 1e-9 * amax)
            throw std::domain_error("mollify: datum support too close to the domain boundary");
    }

    auto hat = fft::forward(raw.values);
    for (std::size_t m = 0; m < g.n_points; ++m) {
        const double k = g.wavenumber(m);
        hat[m] *= std::exp(-0.5 * k * k * w * w);
    }
    return Field(g, fft::inverse_real(std::move(hat)));
}

}  // namespace kslab
