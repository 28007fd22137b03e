#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kslab/entropy.hpp"
#include "kslab/grid.hpp"
#include "kslab/solver.hpp"

// Entropy-solution reference for u_t + A u u_x = 0: the exact Riemann
// solution, the Godunov flux and a first-order monotone finite-volume scheme,
// plus weak-form and entropy-inequality residual diagnostics.

namespace kslab {

// Self-similar solution u(x, t) = w(x / t) of the Riemann problem. Negative A
// reduces through the symmetry u -> -u, A -> -A.
inline double riemann_exact(double u_l, double u_r, double a_coeff, double xi) {
    if (a_coeff == 0.0)
        throw std::invalid_argument("riemann_exact: degenerate coefficient A = 0");
    if (a_coeff < 0.0) return -riemann_exact(-u_l, -u_r, -a_coeff, xi);
    if (u_l == u_r) return u_l;
    if (u_l > u_r) {  // shock at speed A (u_l + u_r) / 2
        const double s = 0.5 * a_coeff * (u_l + u_r);
        return (xi < s) ? u_l : u_r;
    }
    // rarefaction fan between A u_l and A u_r
    if (xi <= a_coeff * u_l) return u_l;
    if (xi >= a_coeff * u_r) return u_r;
    return xi / a_coeff;
}

// Godunov numerical flux for f(u) = A u^2 / 2: the extremum of f over the
// interval between the states, minimum for u_l <= u_r, maximum otherwise.
inline double godunov_flux(double u_l, double u_r, double a_coeff) {
    if (a_coeff == 0.0) return 0.0;
    if (a_coeff < 0.0) return -godunov_flux(-u_l, -u_r, -a_coeff);
    auto f = [a_coeff](double u) { return 0.5 * a_coeff * u * u; };
    if (u_l <= u_r) {
        if (u_l <= 0.0 && 0.0 <= u_r) return 0.0;  // sonic point inside
        return std::min(f(u_l), f(u_r));
    }
    return std::max(f(u_l), f(u_r));
}

inline double total_variation(const Field& f) {
    double tv = 0.0;
    const std::size_t n = f.size();
    for (std::size_t j = 0; j < n; ++j) tv += std::abs(f[(j + 1) % n] - f[j]);
    return tv;
}

// First-order Godunov finite-volume solve on the periodic grid (nodes act as
// cell centers). A positive mollification width smooths the datum first; a
// nonpositive width samples it raw, which the scheme handles natively. The
// CFL bound is enforced by reducing dt, never by failing.
inline Trajectory burgers_solve(const InitialDatum& datum, double a_coeff, const Grid& grid,
                                double t_final, std::vector<double> snapshot_times,
                                double cfl = 0.9) {
    if (!(t_final > 0.0)) throw std::invalid_argument("burgers_solve: t_final must be positive");
    if (!(cfl > 0.0) || cfl > 0.95)
        throw std::invalid_argument("burgers_solve: cfl must lie in (0, 0.95]");

    Trajectory traj;
    traj.params = KSParams{a_coeff, 0.0, 0.0, 0.0, 0.0, 0.0};
    traj.grid = grid;

    Field u = (datum.mollification_width > 0.0) ? mollify(datum, grid)
                                                : detail::sample_raw(datum, grid);

    std::vector<double> events;
    for (double t : snapshot_times) {
        if (t < -1e-12 || t > t_final * (1.0 + 1e-12))
            throw std::invalid_argument("burgers_solve: snapshot time outside [0, t_final]");
        if (t > 1e-12) events.push_back(std::min(t, t_final));
    }
    events.push_back(t_final);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 events.end());
    auto is_requested = [&](double t) {
        for (double s : snapshot_times)
            if (std::abs(s - t) < 1e-12) return true;
        return false;
    };

    traj.snapshots.emplace_back(0.0, u);

    auto log_state = [&](double t, double dt) {
        StepRecord r;
        r.t = t;
        r.dt = dt;
        r.mass = integral(u);
        r.linf = norm(u, NormKind::linf);
        r.l2 = norm(u, NormKind::l2);
        r.l4 = norm(u, NormKind::l4);
        traj.step_log.push_back(r);
    };
    log_state(0.0, 0.0);

    const std::size_t n = grid.n_points;
    const double h = grid.spacing;
    std::vector<double> flux(n);
    double t = 0.0;
    std::size_t ei = 0;

    while (ei < events.size()) {
        const double target = events[ei];
        const double gap = target - t;
        if (gap <= 1e-14 * std::max(1.0, target)) {
            if (is_requested(target)) traj.snapshots.emplace_back(target, u);
            ++ei;
            continue;
        }
        const double umax = norm(u, NormKind::linf);
        double dt = cfl * h / (std::abs(a_coeff) * umax + 1e-300);
        const bool hits = dt >= gap * (1.0 - 1e-12);
        if (hits) dt = gap;

        for (std::size_t j = 0; j < n; ++j)
            flux[j] = godunov_flux(u[j], u[(j + 1) % n], a_coeff);
        const double lam = dt / h;
        double prev = flux[n - 1];
        for (std::size_t j = 0; j < n; ++j) {
            const double keep = flux[j];
            u[j] -= lam * (flux[j] - prev);
            prev = keep;
        }

        t = hits ? target : t + dt;
        traj.accepted_dt.push_back(dt);
        ++traj.step_count;
        log_state(t, dt);
        if (hits) {
            if (is_requested(target)) traj.snapshots.emplace_back(target, u);
            ++ei;
        }
    }
    return traj;
}

// Flux-kind dispatcher used by configuration code.
inline EntropyPair make_entropy_pair(EntropyKind kind, double a_coeff, double k = 0.0,
                                     double delta = 1e-3, double center = 0.5,
                                     double radius = 0.75) {
    switch (kind) {
        case EntropyKind::square: return make_square_entropy(a_coeff);
        case EntropyKind::kruzhkov_smoothed: return make_kruzhkov_entropy(a_coeff, k, delta);
        case EntropyKind::compact_bump: return make_bump_entropy(a_coeff, center, radius);
    }
    throw std::invalid_argument("make_entropy_pair: unknown kind");
}

namespace detail {

inline void check_phi_support(const Trajectory& traj, const TestFunction& phi,
                              bool allow_initial_time) {
    const double t_first = traj.snapshots.front().first;
    const double t_last = traj.snapshots.back().first;
    const double t_lo = phi.t_center - phi.t_radius;
    const double t_hi = phi.t_center + phi.t_radius;
    const double lo_bound = allow_initial_time ? t_first - 1e-12 : t_first;
    if (t_lo < lo_bound || t_hi > t_last + 1e-12)
        throw std::invalid_argument("test function support not covered by the trajectory window");
    const double L = traj.grid.half_length;
    if (phi.x_center - phi.x_radius <= -L || phi.x_center + phi.x_radius >= L)
        throw std::invalid_argument("test function support not inside the spatial domain");
}

// Trapezoid in t over the snapshots of the space integrals g(t_m).
inline double time_trapezoid(const std::vector<std::pair<double, double>>& samples) {
    double acc = 0.0;
    for (std::size_t m = 0; m + 1 < samples.size(); ++m) {
        const auto& [t0, g0] = samples[m];
        const auto& [t1, g1] = samples[m + 1];
        acc += 0.5 * (g0 + g1) * (t1 - t0);
    }
    return acc;
}

}  // namespace detail

// Residual of the distributional form
//   integral (u phi_t + (A u^2 / 2) phi_x) dt dx + integral u0 phi(0, .) dx,
// which vanishes for weak solutions.
inline double weak_form_residual(const Trajectory& traj, double a_coeff, const Field& datum_field,
                                 const TestFunction& phi) {
    if (!(datum_field.grid == traj.grid))
        throw std::invalid_argument("weak_form_residual: datum grid mismatch");
    detail::check_phi_support(traj, phi, /*allow_initial_time=*/true);

    const Grid& g = traj.grid;
    std::vector<std::pair<double, double>> samples;
    samples.reserve(traj.snapshots.size());
    for (const auto& [t, f] : traj.snapshots) {
        double s = 0.0;
        for (std::size_t j = 0; j < g.n_points; ++j) {
            const double x = g.node(j);
            s += f[j] * phi.dt(t, x) + 0.5 * a_coeff * f[j] * f[j] * phi.dx(t, x);
        }
        samples.emplace_back(t, s * g.spacing);
    }
    double r = detail::time_trapezoid(samples);
    const double t0 = traj.snapshots.front().first;
    for (std::size_t j = 0; j < g.n_points; ++j)
        r += datum_field[j] * phi.value(t0, g.node(j)) * g.spacing;
    return r;
}

// R(phi) = -integral (eta(u) phi_t + q(u) phi_x) dt dx for nonnegative phi;
// entropy solutions satisfy R(phi) <= 0 up to discretization.
inline double entropy_residual(const Trajectory& traj, const EntropyPair& pair,
                               const TestFunction& phi) {
    if (!phi.nonnegative())
        throw std::invalid_argument("entropy_residual: test function must be nonnegative");
    detail::check_phi_support(traj, phi, /*allow_initial_time=*/false);

    const Grid& g = traj.grid;
    std::vector<std::pair<double, double>> samples;
    samples.reserve(traj.snapshots.size());
    for (const auto& [t, f] : traj.snapshots) {
        double s = 0.0;
        for (std::size_t j = 0; j < g.n_points; ++j) {
            const double x = g.node(j);
            s += pair.eta(f[j]) * phi.dt(t, x) + pair.q(f[j]) * phi.dx(t, x);
        }
        samples.emplace_back(t, s * g.spacing);
    }
    return -detail::time_trapezoid(samples);
}

}  // namespace kslab
