#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/params.hpp"

// Time integration of
//
//   u_t + A u u_x + beta u_xxx - B beta (u u_xx)_x - C beta u_x u_xx
//       - eps u_xx - D beta (u u_x)_x = 0
//
// on the periodic grid. The linear symbol lambda(k) = i beta k^3 - eps k^2 is
// absorbed exactly by an integrating factor; the nonlinear remainder is
// advanced with classical fourth-order Runge-Kutta (Lawson scheme). Products
// are evaluated pseudo-spectrally and truncated at the dealias fraction after
// every multiplication; the advective term uses the split form
// (A/2) u u_x + (A/4) (u^2)_x so the zero mode of the tendency vanishes
// identically and mass is conserved to roundoff.
//
// A single run is strictly sequential and deterministic; distinct runs share
// no mutable state and may execute concurrently.

namespace kslab {

struct SolverConfig {
    double cfl_advective = 0.5;   // in (0, 1]
    double cfl_dispersive = 0.5;  // in (0, 1]
    double t_final = 1.0;
    std::vector<double> snapshot_times;  // subset of [0, t_final]
    double dealias_fraction = 2.0 / 3.0;
    double max_dt = 0.0;  // 0 = no explicit cap
    bool allow_nonconservative = false;
};

// One entry of the dense per-step log: everything the a-priori-estimate
// post-processing integrates in time.
struct StepRecord {
    double t = 0.0;
    double dt = 0.0;
    double mass = 0.0;
    double linf = 0.0;
    double l2 = 0.0;
    double l4 = 0.0;
    double grad_l2 = 0.0;
    double hess_l2 = 0.0;
    double ux_uxx_l1 = 0.0;       // integral |u_x u_xx|
    double u_uxx_l2sq = 0.0;      // integral (u u_xx)^2
    double u_ux_l2sq = 0.0;       // integral (u u_x)^2
    double u_ux_uxx_l1 = 0.0;     // integral |u u_x u_xx|
};

enum class RunStatus { completed, blew_up };

struct Trajectory {
    KSParams params;
    Grid grid;
    std::vector<std::pair<double, Field>> snapshots;  // strictly increasing times
    std::vector<StepRecord> step_log;                 // record at t=0 and after every step
    std::vector<double> accepted_dt;
    std::size_t step_count = 0;
    RunStatus status = RunStatus::completed;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    bool boundary_contact = false;
    double boundary_contact_time = std::numeric_limits<double>::quiet_NaN();

    const Field& snapshot_at(double t, double tol = 1e-9) const {
        for (const auto& [ts, f] : snapshots)
            if (std::abs(ts - t) <= tol) return f;
        throw std::out_of_range("Trajectory: no snapshot at requested time");
    }
};

struct SolverBlowup : std::runtime_error {
    explicit SolverBlowup(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// Shared spectral machinery for one (grid, dealias fraction) pair.
struct SpectralWorkspace {
    Grid grid;
    std::size_t cutoff;       // largest |signed mode| kept by the dealias filter
    std::vector<double> k;    // wavenumber per spectrum index

    SpectralWorkspace(const Grid& g, double dealias_fraction) : grid(g), k(g.n_points) {
        if (!(dealias_fraction > 0.0) || dealias_fraction > 1.0)
            throw std::invalid_argument("dealias_fraction must lie in (0, 1]");
        cutoff = std::min<std::size_t>(
            std::size_t(std::floor(dealias_fraction * double(g.n_points / 2))), g.n_points / 2);
        for (std::size_t m = 0; m < g.n_points; ++m) k[m] = g.wavenumber(m);
    }

    void truncate(std::vector<fft::cplx>& hat) const {
        for (std::size_t m = 0; m < hat.size(); ++m)
            if (std::size_t(std::labs(grid.signed_mode(m))) > cutoff) hat[m] = 0.0;
    }

    std::vector<fft::cplx> derivative_hat(const std::vector<fft::cplx>& hat, int order) const {
        std::vector<fft::cplx> out(hat.size());
        const std::size_t nyq = grid.n_points / 2;
        for (std::size_t m = 0; m < hat.size(); ++m) {
            const double km = k[m];
            if (order == 2)
                out[m] = hat[m] * (-km * km);
            else if (m == nyq)
                out[m] = 0.0;
            else if (order == 1)
                out[m] = hat[m] * fft::cplx(0.0, km);
            else
                out[m] = hat[m] * fft::cplx(0.0, -km * km * km);
        }
        return out;
    }

    // Spectrum of the nonlinear tendency. plain collects terms entering as-is,
    // fluxed collects terms carrying an outer d/dx.
    std::vector<fft::cplx> nonlinear_hat(const std::vector<fft::cplx>& hat,
                                         const KSParams& p) const {
        const std::size_t n = grid.n_points;
        const auto u = fft::inverse_real(std::vector<fft::cplx>(hat));
        const auto ux = fft::inverse_real(derivative_hat(hat, 1));
        const auto uxx = fft::inverse_real(derivative_hat(hat, 2));

        std::vector<double> plain(n), fluxed(n);
        const double a = p.a_coeff;
        for (std::size_t j = 0; j < n; ++j) {
            plain[j] = -0.5 * a * u[j] * ux[j] + p.c_coeff * p.beta * ux[j] * uxx[j];
            fluxed[j] = -0.25 * a * u[j] * u[j] + p.b_coeff * p.beta * u[j] * uxx[j] +
                        p.d_coeff * p.beta * u[j] * ux[j];
        }
        auto out = fft::forward(plain);
        auto fhat = fft::forward(fluxed);
        const std::size_t nyq = n / 2;
        for (std::size_t m = 0; m < n; ++m) {
            const fft::cplx dx = (m == nyq) ? fft::cplx(0.0) : fft::cplx(0.0, k[m]);
            out[m] += dx * fhat[m];
        }
        truncate(out);
        return out;
    }

    // exp(lambda dt) with lambda(k) = i beta k^3 - eps k^2; the Nyquist mode
    // gets no dispersive rotation (its odd derivative is not representable).
    std::vector<fft::cplx> exponential_factor(const KSParams& p, double dt) const {
        std::vector<fft::cplx> e(grid.n_points);
        const std::size_t nyq = grid.n_points / 2;
        for (std::size_t m = 0; m < grid.n_points; ++m) {
            const double km = k[m];
            const double re = std::exp(-p.eps * km * km * dt);
            const double phase = (m == nyq) ? 0.0 : p.beta * km * km * km * dt;
            e[m] = re * fft::cplx(std::cos(phase), std::sin(phase));
        }
        return e;
    }
};

inline void axpy(std::vector<fft::cplx>& y, double a, const std::vector<fft::cplx>& x) {
    for (std::size_t m = 0; m < y.size(); ++m) y[m] += a * x[m];
}

inline std::vector<fft::cplx> scaled(const std::vector<fft::cplx>& e,
                                     const std::vector<fft::cplx>& x) {
    std::vector<fft::cplx> out(x.size());
    for (std::size_t m = 0; m < x.size(); ++m) out[m] = e[m] * x[m];
    return out;
}

// One integrating-factor RK4 step in spectral space.
inline std::vector<fft::cplx> ifrk4_step(const SpectralWorkspace& ws,
                                         const std::vector<fft::cplx>& hat, const KSParams& p,
                                         double dt, const std::vector<fft::cplx>& e_full,
                                         const std::vector<fft::cplx>& e_half) {
    const auto k1 = ws.nonlinear_hat(hat, p);

    auto s2 = hat;
    axpy(s2, 0.5 * dt, k1);
    s2 = scaled(e_half, s2);
    const auto k2 = ws.nonlinear_hat(s2, p);

    auto s3 = scaled(e_half, hat);
    axpy(s3, 0.5 * dt, k2);
    const auto k3 = ws.nonlinear_hat(s3, p);

    auto s4 = scaled(e_full, hat);
    axpy(s4, dt, scaled(e_half, k3));
    const auto k4 = ws.nonlinear_hat(s4, p);

    auto out = scaled(e_full, hat);
    const double w = dt / 6.0;
    axpy(out, w, scaled(e_full, k1));
    axpy(out, 2.0 * w, scaled(e_half, k2));
    axpy(out, 2.0 * w, scaled(e_half, k3));
    axpy(out, w, k4);
    return out;
}

inline StepRecord make_step_record(double t, double dt, const Field& u,
                                   const SpectralWorkspace& ws,
                                   const std::vector<fft::cplx>& hat) {
    StepRecord r;
    r.t = t;
    r.dt = dt;
    const double h = u.grid.spacing;
    const auto ux = fft::inverse_real(ws.derivative_hat(hat, 1));
    const auto uxx = fft::inverse_real(ws.derivative_hat(hat, 2));
    double mass = 0, linf = 0, s2 = 0, s4 = 0, g2 = 0, h2 = 0;
    double pa = 0, pb = 0, pc = 0, pd = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double v = u[j];
        mass += v;
        linf = std::max(linf, std::abs(v));
        const double v2 = v * v;
        s2 += v2;
        s4 += v2 * v2;
        g2 += ux[j] * ux[j];
        h2 += uxx[j] * uxx[j];
        pa += std::abs(ux[j] * uxx[j]);
        pb += v2 * uxx[j] * uxx[j];
        pc += v2 * ux[j] * ux[j];
        pd += std::abs(v * ux[j] * uxx[j]);
    }
    r.mass = mass * h;
    r.linf = linf;
    r.l2 = std::sqrt(s2 * h);
    r.l4 = std::pow(s4 * h, 0.25);
    r.grad_l2 = std::sqrt(g2 * h);
    r.hess_l2 = std::sqrt(h2 * h);
    r.ux_uxx_l1 = pa * h;
    r.u_uxx_l2sq = pb * h;
    r.u_ux_l2sq = pc * h;
    r.u_ux_uxx_l1 = pd * h;
    return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Full right-hand side, term by term, for direct verification. Each term is
// checked for finite values and reported by name on overflow.

inline Field ks_rhs(const Field& f, const KSParams& p, double dealias_fraction = 2.0 / 3.0) {
    if (!f.all_finite()) throw std::overflow_error("ks_rhs: non-finite input field");
    const detail::SpectralWorkspace ws(f.grid, dealias_fraction);
    const std::size_t n = f.grid.n_points;
    auto hat = fft::forward(f.values);

    auto inverse_term = [&](std::vector<fft::cplx> th, const char* name) {
        ws.truncate(th);
        Field out(f.grid, fft::inverse_real(std::move(th)));
        if (!out.all_finite())
            throw std::overflow_error(std::string("ks_rhs: non-finite value in term ") + name);
        return out;
    };
    auto fwd_dx = [&](const std::vector<double>& v) {
        auto vh = fft::forward(v);
        return ws.derivative_hat(vh, 1);
    };

    const auto u = f.values;
    const auto ux = fft::inverse_real(ws.derivative_hat(hat, 1));
    const auto uxx = fft::inverse_real(ws.derivative_hat(hat, 2));

    // advective split form: -(A/2) u u_x - (A/4) d/dx(u^2)
    std::vector<double> prod(n);
    for (std::size_t j = 0; j < n; ++j) prod[j] = u[j] * ux[j];
    auto adv_hat = fft::forward(prod);
    for (auto& z : adv_hat) z *= -0.5 * p.a_coeff;
    for (std::size_t j = 0; j < n; ++j) prod[j] = u[j] * u[j];
    detail::axpy(adv_hat, -0.25 * p.a_coeff, fwd_dx(prod));
    const Field advective = inverse_term(std::move(adv_hat), "advective");

    const Field dispersive =
        inverse_term(ws.derivative_hat(hat, 3), "linear dispersion");  // scaled below
    const Field diffusive = inverse_term(ws.derivative_hat(hat, 2), "diffusion");

    for (std::size_t j = 0; j < n; ++j) prod[j] = u[j] * uxx[j];
    const Field flux_b = inverse_term(fwd_dx(prod), "nonlinear dispersion (divergence)");

    for (std::size_t j = 0; j < n; ++j) prod[j] = ux[j] * uxx[j];
    auto chat = fft::forward(prod);
    const Field term_c = inverse_term(std::move(chat), "nonlinear dispersion (gradient)");

    for (std::size_t j = 0; j < n; ++j) prod[j] = u[j] * ux[j];
    const Field flux_d = inverse_term(fwd_dx(prod), "extra divergence");

    Field out(f.grid);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = advective[j] - p.beta * dispersive[j] + p.eps * diffusive[j] +
                 p.b_coeff * p.beta * flux_b[j] + p.c_coeff * p.beta * term_c[j] +
                 p.d_coeff * p.beta * flux_d[j];
    }
    if (!out.all_finite()) throw std::overflow_error("ks_rhs: non-finite value in assembled tendency");
    return out;
}

// ---------------------------------------------------------------------------
// Stable step size: advective CFL plus an explicit bound for the nonlinear
// dispersive terms (the linear part is integrated exactly and imposes none).

inline double select_timestep(const Field& f, const KSParams& p, const SolverConfig& cfg,
                              double max_dt = std::numeric_limits<double>::infinity()) {
    constexpr double tiny = 1e-300;
    const double h = f.grid.spacing;
    const double umax = norm(f, NormKind::linf);
    const double adv = cfg.cfl_advective * h / (std::abs(p.a_coeff) * umax + tiny);
    const double disp = cfg.cfl_dispersive * h * h * h /
                        (p.beta * (std::abs(p.b_coeff) + std::abs(p.c_coeff)) * (umax + 1.0) + tiny);
    double dt = std::min(adv, disp);
    if (cfg.max_dt > 0.0) dt = std::min(dt, cfg.max_dt);
    return std::min(dt, max_dt);
}

// One integrating-factor RK4 step of the full equation.
inline Field step(const Field& f, const KSParams& p, double dt,
                  double dealias_fraction = 2.0 / 3.0) {
    const detail::SpectralWorkspace ws(f.grid, dealias_fraction);
    auto hat = fft::forward(f.values);
    const auto e_full = ws.exponential_factor(p, dt);
    const auto e_half = ws.exponential_factor(p, 0.5 * dt);
    hat = detail::ifrk4_step(ws, hat, p, dt, e_full, e_half);
    Field out(f.grid, fft::inverse_real(std::move(hat)));
    if (!out.all_finite()) throw SolverBlowup("step: non-finite state after update");
    return out;
}

// ---------------------------------------------------------------------------
// Full simulation driver. Snapshots are hit exactly; every accepted step is
// logged. Blow-ups end the run early with the last good state appended;
// solution support reaching the outer 10% of the domain sets a diagnostic
// flag instead of failing the run.

inline Trajectory simulate(const InitialDatum& datum, const KSParams& p, const SolverConfig& cfg,
                           const Grid& grid) {
    if (!(cfg.t_final > 0.0)) throw std::invalid_argument("simulate: t_final must be positive");
    if (!(cfg.cfl_advective > 0.0) || cfg.cfl_advective > 1.0 || !(cfg.cfl_dispersive > 0.0) ||
        cfg.cfl_dispersive > 1.0)
        throw std::invalid_argument("simulate: CFL numbers must lie in (0, 1]");
    if (!p.energy_preserving() && !cfg.allow_nonconservative)
        throw std::invalid_argument(
            "simulate: coefficients are not energy preserving; set the explicit override to run anyway");

    InitialDatum resolved = datum;
    if (!(resolved.mollification_width > 0.0))
        resolved.mollification_width = std::max(p.eps, 2.0 * grid.spacing);

    Trajectory traj;
    traj.params = p;
    traj.grid = grid;

    const Field u0 = mollify(resolved, grid);

    // event list: requested snapshot times plus the final time
    std::vector<double> events;
    for (double t : cfg.snapshot_times) {
        if (t < -1e-12 || t > cfg.t_final * (1.0 + 1e-12))
            throw std::invalid_argument("simulate: snapshot time outside [0, t_final]");
        if (t > 1e-12) events.push_back(std::min(t, cfg.t_final));
    }
    events.push_back(cfg.t_final);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 events.end());
    auto is_requested = [&](double t) {
        for (double s : cfg.snapshot_times)
            if (std::abs(s - t) < 1e-12) return true;
        return false;
    };

    const detail::SpectralWorkspace ws(grid, cfg.dealias_fraction);
    auto hat = fft::forward(u0.values);
    ws.truncate(hat);
    Field u(grid, fft::inverse_real(std::vector<fft::cplx>(hat)));

    traj.snapshots.emplace_back(0.0, u0);
    traj.step_log.push_back(detail::make_step_record(0.0, 0.0, u, ws, hat));

    const double support_threshold = 1e-8;
    auto check_boundary = [&](double t) {
        if (traj.boundary_contact) return;
        const double cut = 0.9 * grid.half_length;
        const double ref = std::max(1.0, norm(u, NormKind::linf));
        for (std::size_t j = 0; j < u.size(); ++j) {
            if (std::abs(grid.node(j)) >= cut && std::abs(u[j]) > support_threshold * ref) {
                traj.boundary_contact = true;
                traj.boundary_contact_time = t;
                return;
            }
        }
    };
    check_boundary(0.0);

    double t = 0.0;
    std::size_t ei = 0;
    double cached_dt = -1.0;
    std::vector<fft::cplx> e_full, e_half;

    while (ei < events.size()) {
        const double target = events[ei];
        const double gap = target - t;
        if (gap <= 1e-14 * std::max(1.0, target)) {
            if (is_requested(target)) traj.snapshots.emplace_back(target, u);
            ++ei;
            continue;
        }
        double dt = select_timestep(u, p, cfg, gap);
        const bool hits = dt >= gap * (1.0 - 1e-12);
        if (hits) dt = gap;
        if (!(dt > 0.0)) throw std::runtime_error("simulate: time step underflow");

        if (dt != cached_dt) {
            e_full = ws.exponential_factor(p, dt);
            e_half = ws.exponential_factor(p, 0.5 * dt);
            cached_dt = dt;
        }

        std::vector<fft::cplx> next;
        bool finite = true;
        try {
            next = detail::ifrk4_step(ws, hat, p, dt, e_full, e_half);
        } catch (const std::exception&) {
            finite = false;
        }
        Field unew;
        if (finite) {
            unew = Field(grid, fft::inverse_real(std::vector<fft::cplx>(next)));
            finite = unew.all_finite();
        }
        if (!finite) {
            traj.status = RunStatus::blew_up;
            traj.blowup_time = t + dt;
            traj.snapshots.emplace_back(t, u);  // last good state
            return traj;
        }

        hat = std::move(next);
        u = std::move(unew);
        t = hits ? target : t + dt;
        traj.accepted_dt.push_back(dt);
        ++traj.step_count;
        traj.step_log.push_back(detail::make_step_record(t, dt, u, ws, hat));
        check_boundary(t);

        if (hits) {
            if (is_requested(target)) traj.snapshots.emplace_back(target, u);
            ++ei;
        }
    }
    return traj;
}

}  // namespace kslab
