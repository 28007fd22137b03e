#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "kslab/burgers.hpp"
#include "kslab/estimates.hpp"
#include "kslab/grid.hpp"
#include "kslab/params.hpp"
#include "kslab/solver.hpp"

// The singular-limit experiment: sweep eps_n downward with beta_n = c eps_n^4,
// solve the regularized equation for each pair, and measure L^p window errors
// (p in {1, 2, 3}) against an entropy-solution reference.

namespace kslab {

struct SpaceTimeWindow {
    double t_min = 0.0, t_max = 1.0;
    double x_min = -1.0, x_max = 1.0;
};

enum class ReferenceKind { godunov_fine, riemann_exact, self_check };

struct SweepConfig {
    Grid grid;
    SolverConfig solver;           // t_final, CFL numbers, dealias fraction
    InitialDatum datum;
    double a_coeff = 1.0;
    std::vector<double> eps_sequence;  // strictly decreasing, positive
    double coupling_c = 1.0;
    double coupling_exponent = 4.0;    // anything other than 4 flags the table
    SpaceTimeWindow window;
    std::vector<int> p_exponents{1, 2, 3};
    ReferenceKind reference = ReferenceKind::godunov_fine;
    int refinement = 8;                // reference grid is refinement * n_points
    int window_snapshots = 21;         // shared snapshot schedule across the window
    int jobs = 1;
};

struct SweepRow {
    double eps = 0.0;
    double beta = 0.0;
    std::map<int, double> errors;  // p -> window error
    double runtime_seconds = 0.0;
    bool failed = false;
    std::string note;
};

struct ConvergenceTable {
    std::vector<SweepRow> rows;  // ordered by eps descending
    bool coupling_violated = false;
    std::map<int, std::vector<double>> pairwise_orders;  // log ratios per adjacent pair
};

struct OrderEstimate {
    double order = 0.0;
    double residual = 0.0;
    bool no_convergence = false;
};

struct SweepResult {
    ConvergenceTable table;
    std::vector<Trajectory> runs;  // aligned with table.rows
    Trajectory reference;
    std::vector<std::string> notes;
};

// ---------------------------------------------------------------------------
// L^p error over a window.

inline double lp_window_error(const Field& f, const Field& g, double x_min, double x_max, int p) {
    if (!(f.grid == g.grid)) throw std::invalid_argument("lp_window_error: grid mismatch");
    if (p < 1 || p > 3) throw std::invalid_argument("lp_window_error: p must be 1, 2 or 3");
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double x = f.grid.node(j);
        if (x < x_min || x > x_max) continue;
        s += integer_power(std::abs(f[j] - g[j]), unsigned(p));
    }
    return std::pow(s * f.grid.spacing, 1.0 / double(p));
}

namespace detail {

// Value of `f` at the nodes of `target`: exact subsampling when the grids are
// nested, periodic linear interpolation otherwise.
inline std::vector<double> resample_to(const Field& f, const Grid& target) {
    const Grid& src = f.grid;
    std::vector<double> out(target.n_points);
    const std::size_t ratio = src.n_points / std::max<std::size_t>(1, target.n_points);
    const bool nested = src.half_length == target.half_length && ratio >= 1 &&
                        ratio * target.n_points == src.n_points;
    if (nested) {
        for (std::size_t j = 0; j < target.n_points; ++j) out[j] = f[j * ratio];
        return out;
    }
    for (std::size_t j = 0; j < target.n_points; ++j) {
        double s = (target.node(j) + src.half_length) / src.spacing;
        s -= std::floor(s / double(src.n_points)) * double(src.n_points);
        const std::size_t i0 = std::size_t(s) % src.n_points;
        const std::size_t i1 = (i0 + 1) % src.n_points;
        const double w = s - std::floor(s);
        out[j] = (1.0 - w) * f[i0] + w * f[i1];
    }
    return out;
}

struct WindowTimes {
    std::vector<double> times;          // common times covering the window
    std::vector<std::size_t> idx_a;     // snapshot indices in each trajectory
    std::vector<std::size_t> idx_b;
};

inline WindowTimes match_window_times(const Trajectory& a, const Trajectory& b,
                                      const SpaceTimeWindow& w) {
    WindowTimes out;
    const double tol = 1e-9 * std::max(1.0, w.t_max);
    for (std::size_t ia = 0; ia < a.snapshots.size(); ++ia) {
        const double t = a.snapshots[ia].first;
        if (t < w.t_min - tol || t > w.t_max + tol) continue;
        for (std::size_t ib = 0; ib < b.snapshots.size(); ++ib) {
            if (std::abs(b.snapshots[ib].first - t) <= tol) {
                out.times.push_back(t);
                out.idx_a.push_back(ia);
                out.idx_b.push_back(ib);
                break;
            }
        }
    }
    if (out.times.size() < 2 || out.times.front() > w.t_min + tol ||
        out.times.back() < w.t_max - tol)
        throw std::invalid_argument("lp_window_error: window not covered by common snapshots");
    return out;
}

}  // namespace detail

// Space-time L^p error between two trajectories over the window; the second
// trajectory is resampled onto the first grid.
inline double lp_window_error(const Trajectory& a, const Trajectory& b,
                              const SpaceTimeWindow& w, int p) {
    if (p < 1 || p > 3) throw std::invalid_argument("lp_window_error: p must be 1, 2 or 3");
    const auto match = detail::match_window_times(a, b, w);
    const Grid& g = a.grid;

    std::vector<double> slice(match.times.size(), 0.0);
    for (std::size_t m = 0; m < match.times.size(); ++m) {
        const Field& fa = a.snapshots[match.idx_a[m]].second;
        const auto fb = detail::resample_to(b.snapshots[match.idx_b[m]].second, g);
        double s = 0.0;
        for (std::size_t j = 0; j < g.n_points; ++j) {
            const double x = g.node(j);
            if (x < w.x_min || x > w.x_max) continue;
            s += integer_power(std::abs(fa[j] - fb[j]), unsigned(p));
        }
        slice[m] = s * g.spacing;
    }
    double acc = 0.0;
    for (std::size_t m = 0; m + 1 < slice.size(); ++m)
        acc += 0.5 * (slice[m] + slice[m + 1]) * (match.times[m + 1] - match.times[m]);
    return std::pow(acc, 1.0 / double(p));
}

namespace detail {

inline std::vector<double> window_schedule(const SweepConfig& cfg) {
    std::vector<double> times = cfg.solver.snapshot_times;
    const int n = std::max(2, cfg.window_snapshots);
    for (int i = 0; i < n; ++i) {
        times.push_back(cfg.window.t_min +
                        (cfg.window.t_max - cfg.window.t_min) * double(i) / double(n - 1));
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                times.end());
    return times;
}

inline Trajectory build_riemann_reference(const SweepConfig& cfg,
                                          const std::vector<double>& times) {
    const auto* stepd = std::get_if<RiemannStepDatum>(&cfg.datum.kind);
    if (!stepd)
        throw std::invalid_argument("run_sweep: the exact Riemann reference needs step data");
    Trajectory traj;
    traj.params = KSParams{cfg.a_coeff, 0, 0, 0, 0, 0};
    traj.grid = cfg.grid;
    traj.snapshots.emplace_back(0.0, sample_raw(cfg.datum, cfg.grid));
    for (double t : times) {
        if (t <= 0.0) continue;
        Field f = sample(cfg.grid, [&](double x) {
            return riemann_exact(stepd->left_value, stepd->right_value, cfg.a_coeff, x / t);
        });
        traj.snapshots.emplace_back(t, std::move(f));
    }
    return traj;
}

}  // namespace detail

// One regularized run per eps, one shared reference, full error table.
// Rows are independent and are distributed over `jobs` worker threads; each
// row's solve is single-threaded and bitwise deterministic.
inline SweepResult run_sweep(const SweepConfig& cfg) {
    if (cfg.eps_sequence.empty()) throw std::invalid_argument("run_sweep: empty eps sequence");
    for (std::size_t i = 0; i < cfg.eps_sequence.size(); ++i) {
        if (!(cfg.eps_sequence[i] > 0.0))
            throw std::invalid_argument("run_sweep: eps values must be positive");
        if (i > 0 && !(cfg.eps_sequence[i] < cfg.eps_sequence[i - 1]))
            throw std::invalid_argument("run_sweep: eps sequence must be strictly decreasing");
    }
    for (int p : cfg.p_exponents)
        if (p < 1 || p > 3)
            throw std::invalid_argument("run_sweep: p exponents must be 1, 2 or 3");
    if (!(cfg.window.t_min < cfg.window.t_max) ||
        cfg.window.t_max > cfg.solver.t_final * (1.0 + 1e-12))
        throw std::invalid_argument("run_sweep: window times must lie inside the simulated horizon");
    if (cfg.window.x_min < -cfg.grid.half_length || cfg.window.x_max > cfg.grid.half_length)
        throw std::invalid_argument("run_sweep: window must lie inside the spatial domain");

    SweepResult result;
    const double eps_min = cfg.eps_sequence.back();
    if (cfg.grid.spacing > eps_min / 4.0)
        result.notes.push_back("resolution: spacing exceeds eps_min/4; thin layers may be underresolved");

    result.table.coupling_violated = cfg.coupling_exponent != 4.0;
    if (result.table.coupling_violated)
        result.notes.push_back("coupling_violated: beta does not follow the quartic coupling");

    const auto times = detail::window_schedule(cfg);
    SolverConfig solver = cfg.solver;
    solver.snapshot_times = times;

    // shared reference
    switch (cfg.reference) {
        case ReferenceKind::godunov_fine: {
            const Grid fine = make_grid(cfg.grid.half_length,
                                        cfg.grid.n_points * std::size_t(std::max(1, cfg.refinement)));
            InitialDatum raw = cfg.datum;
            raw.mollification_width = 0.0;  // the scheme takes the sharp datum directly
            result.reference = burgers_solve(raw, cfg.a_coeff, fine, solver.t_final, times);
            break;
        }
        case ReferenceKind::riemann_exact:
            result.reference = detail::build_riemann_reference(cfg, times);
            break;
        case ReferenceKind::self_check:
            break;  // each row is compared to itself (harness diagnostic)
    }

    const std::size_t n_rows = cfg.eps_sequence.size();
    result.table.rows.resize(n_rows);
    result.runs.resize(n_rows);

    auto run_row = [&](std::size_t i) {
        SweepRow& row = result.table.rows[i];
        const double eps = cfg.eps_sequence[i];
        row.eps = eps;
        row.beta = (cfg.coupling_exponent == 4.0)
                       ? coupling_beta(eps, cfg.coupling_c)
                       : cfg.coupling_c * std::pow(eps, cfg.coupling_exponent);
        const KSParams params = make_energy_preserving_params(cfg.a_coeff, eps, row.beta);

        InitialDatum datum = cfg.datum;
        if (!(datum.mollification_width > 0.0))
            datum.mollification_width = std::max(eps, 2.0 * cfg.grid.spacing);

        const auto t0 = std::chrono::steady_clock::now();
        try {
            Trajectory traj = simulate(datum, params, solver, cfg.grid);
            if (traj.status == RunStatus::blew_up) {
                row.failed = true;
                row.note = "blow-up at t = " + std::to_string(traj.blowup_time);
            } else {
                const Trajectory& ref =
                    (cfg.reference == ReferenceKind::self_check) ? traj : result.reference;
                for (int p : cfg.p_exponents)
                    row.errors[p] = lp_window_error(traj, ref, cfg.window, p);
            }
            result.runs[i] = std::move(traj);
        } catch (const std::exception& e) {
            row.failed = true;
            row.note = e.what();
        }
        row.runtime_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    const std::size_t workers = std::min<std::size_t>(std::max(1, cfg.jobs), n_rows);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_rows; ++i) run_row(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n_rows; i = next.fetch_add(1))
                    run_row(i);
            });
        for (auto& th : pool) th.join();
    }

    for (int p : cfg.p_exponents) {
        auto& orders = result.table.pairwise_orders[p];
        for (std::size_t i = 0; i + 1 < n_rows; ++i) {
            const auto& r0 = result.table.rows[i];
            const auto& r1 = result.table.rows[i + 1];
            if (r0.failed || r1.failed || !r0.errors.count(p) || !r1.errors.count(p)) continue;
            const double e0 = r0.errors.at(p), e1 = r1.errors.at(p);
            if (e0 <= 0.0 || e1 <= 0.0) continue;
            orders.push_back(std::log(e0 / e1) / std::log(r0.eps / r1.eps));
        }
    }
    return result;
}

// Least-squares slope of log(error) against log(eps) per exponent.
inline std::map<int, OrderEstimate> empirical_order(const ConvergenceTable& table) {
    std::map<int, OrderEstimate> out;
    std::vector<int> ps;
    for (const auto& row : table.rows)
        for (const auto& [p, e] : row.errors)
            if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);

    for (int p : ps) {
        std::vector<double> lx, ly;
        for (const auto& row : table.rows) {
            if (row.failed || !row.errors.count(p)) continue;
            const double e = row.errors.at(p);
            if (!(e > 0.0)) continue;
            lx.push_back(std::log(row.eps));
            ly.push_back(std::log(e));
        }
        if (lx.size() < 3)
            throw std::invalid_argument("empirical_order: need at least 3 successful rows");
        const double n = double(lx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        OrderEstimate est;
        est.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double intercept = (sy - est.order * sx) / n;
        double rss = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const double r = ly[i] - (est.order * lx[i] + intercept);
            rss += r * r;
        }
        est.residual = std::sqrt(rss / n);
        est.no_convergence = est.order <= 1e-3;
        out[p] = est;
    }
    return out;
}

}  // namespace kslab
