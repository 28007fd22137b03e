#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "kslab/entropy.hpp"
#include "kslab/grid.hpp"
#include "kslab/params.hpp"
#include "kslab/solver.hpp"

// Post-processing of trajectories: the per-snapshot functionals and cumulative
// dissipation/rate integrals whose uniform boundedness the limit experiments
// verify. Time integrals use the dense per-step log, not just the snapshots.

namespace kslab {

struct SnapshotFunctionals {
    double t = 0.0;
    double l2 = 0.0;
    double l4 = 0.0;
    double linf = 0.0;
    double grad_l2 = 0.0;
    double hess_l2 = 0.0;
    double energy = 0.0;   // ||u||_2^2 + beta ||u_x||_2^2
    double l4func = 0.0;   // ||u||_4^4 / 4 + eps^2 ||u_x||_2^2 / 2
};

inline SnapshotFunctionals snapshot_functionals(const Field& f, const KSParams& p,
                                                double t = 0.0) {
    SnapshotFunctionals row;
    row.t = t;
    row.l2 = norm(f, NormKind::l2);
    row.l4 = norm(f, NormKind::l4);
    row.linf = norm(f, NormKind::linf);
    row.grad_l2 = norm(spectral_derivative(f, 1), NormKind::l2);
    row.hess_l2 = norm(spectral_derivative(f, 2), NormKind::l2);
    row.energy = row.l2 * row.l2 + p.beta * row.grad_l2 * row.grad_l2;
    const double l44 = row.l4 * row.l4 * row.l4 * row.l4;
    row.l4func = 0.25 * l44 + 0.5 * p.eps * p.eps * row.grad_l2 * row.grad_l2;
    return row;
}

struct LinfBoundCheck {
    double lhs = 0.0;          // max u^2
    double rhs = 0.0;          // min u^2 + 2 ||u||_2 ||u_x||_2
    bool ok = false;
    double scaled_linf = 0.0;  // ||u||_inf * beta^{1/4}, for sweep trend monitoring
};

// Discrete form of u^2(x) - u^2(x0) = 2 integral u u_x: an unconditional
// inequality for grid functions (Cauchy-Schwarz), checked with 1e-10 slack.
inline LinfBoundCheck linf_bound_check(const Field& f, const KSParams& p) {
    LinfBoundCheck out;
    double maxsq = 0.0, minsq = std::numeric_limits<double>::infinity();
    for (double v : f.values) {
        const double v2 = v * v;
        maxsq = std::max(maxsq, v2);
        minsq = std::min(minsq, v2);
    }
    const double l2 = norm(f, NormKind::l2);
    const double g2 = norm(spectral_derivative(f, 1), NormKind::l2);
    out.lhs = maxsq;
    out.rhs = minsq + 2.0 * l2 * g2;
    out.ok = out.lhs <= out.rhs + 1e-10;
    out.scaled_linf = (p.beta > 0.0) ? std::sqrt(maxsq) * std::pow(p.beta, 0.25) : 0.0;
    return out;
}

namespace detail {

// Cumulative trapezoid of one log column, sampled at every log time.
template <class Extract>
inline std::vector<double> cumulative_trapezoid(const std::vector<StepRecord>& log,
                                                Extract&& column) {
    std::vector<double> acc(log.size(), 0.0);
    for (std::size_t i = 1; i < log.size(); ++i) {
        const double dt = log[i].t - log[i - 1].t;
        acc[i] = acc[i - 1] + 0.5 * (column(log[i - 1]) + column(log[i])) * dt;
    }
    return acc;
}

inline std::size_t log_index_at(const std::vector<StepRecord>& log, double t) {
    for (std::size_t i = 0; i < log.size(); ++i)
        if (std::abs(log[i].t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
    throw std::out_of_range("estimates: no log record at requested time");
}

}  // namespace detail

struct DissipationBudgetRow {
    double t = 0.0;
    double energy = 0.0;
    double diss1 = 0.0;   // 2 eps integral ||u_x||_2^2
    double diss2 = 0.0;   // 2 beta eps integral ||u_xx||_2^2
    double defect = 0.0;  // E(0) - E(t) - (diss1 + diss2)
};

// Energy budget per snapshot. Only valid for energy-preserving coefficients;
// otherwise the cubic terms survive and the identity does not hold.
inline std::vector<DissipationBudgetRow> dissipation_budget(const Trajectory& traj) {
    if (!traj.params.energy_preserving())
        throw std::invalid_argument(
            "dissipation_budget: coefficients are not energy preserving; the identity does not apply");
    if (traj.step_log.empty()) throw std::invalid_argument("dissipation_budget: empty step log");

    const double eps = traj.params.eps;
    const double beta = traj.params.beta;
    auto energy_of = [beta](const StepRecord& r) {
        return r.l2 * r.l2 + beta * r.grad_l2 * r.grad_l2;
    };
    const auto d1 = detail::cumulative_trapezoid(
        traj.step_log, [eps](const StepRecord& r) { return 2.0 * eps * r.grad_l2 * r.grad_l2; });
    const auto d2 = detail::cumulative_trapezoid(traj.step_log, [eps, beta](const StepRecord& r) {
        return 2.0 * beta * eps * r.hess_l2 * r.hess_l2;
    });

    const double e0 = energy_of(traj.step_log.front());
    std::vector<DissipationBudgetRow> rows;
    rows.reserve(traj.snapshots.size());
    for (const auto& [t, f] : traj.snapshots) {
        const std::size_t i = detail::log_index_at(traj.step_log, t);
        DissipationBudgetRow row;
        row.t = t;
        row.energy = energy_of(traj.step_log[i]);
        row.diss1 = d1[i];
        row.diss2 = d2[i];
        row.defect = e0 - row.energy - (row.diss1 + row.diss2);
        rows.push_back(row);
    }
    return rows;
}

struct RateQuantities {
    // cumulative over the full run
    double q_uxuxx = 0.0;   // beta   integral ||u_x u_xx||_L1
    double q_uxx = 0.0;     // beta^2 integral ||u_xx||_L2^2
    double q_uuxx = 0.0;    // beta^2 integral ||u u_xx||_L2^2
    double q_uuxuxx = 0.0;  // beta   integral ||u u_x u_xx||_L1
    // normalized by the expected eps powers (2, 5, 3, 1)
    double n_uxuxx = 0.0;
    double n_uxx = 0.0;
    double n_uuxx = 0.0;
    double n_uuxuxx = 0.0;
    double eps_u_ux_sq = 0.0;  // eps integral ||u u_x||_L2^2 over the finite horizon
    double horizon = 0.0;
};

inline RateQuantities rate_quantities(const Trajectory& traj) {
    RateQuantities out;
    if (traj.step_log.size() < 2) return out;  // no time interval, all integrals vanish
    const double beta = traj.params.beta;
    const double eps = traj.params.eps;

    const auto iab = detail::cumulative_trapezoid(
        traj.step_log, [](const StepRecord& r) { return r.ux_uxx_l1; });
    const auto ihh = detail::cumulative_trapezoid(
        traj.step_log, [](const StepRecord& r) { return r.hess_l2 * r.hess_l2; });
    const auto iuu = detail::cumulative_trapezoid(
        traj.step_log, [](const StepRecord& r) { return r.u_uxx_l2sq; });
    const auto itr = detail::cumulative_trapezoid(
        traj.step_log, [](const StepRecord& r) { return r.u_ux_uxx_l1; });
    const auto iux = detail::cumulative_trapezoid(
        traj.step_log, [](const StepRecord& r) { return r.u_ux_l2sq; });

    out.q_uxuxx = beta * iab.back();
    out.q_uxx = beta * beta * ihh.back();
    out.q_uuxx = beta * beta * iuu.back();
    out.q_uuxuxx = beta * itr.back();
    out.eps_u_ux_sq = eps * iux.back();
    out.horizon = traj.step_log.back().t;
    if (eps > 0.0) {
        out.n_uxuxx = out.q_uxuxx / integer_power(eps, 2);
        out.n_uxx = out.q_uxx / integer_power(eps, 5);
        out.n_uuxx = out.q_uuxx / integer_power(eps, 3);
        out.n_uuxuxx = out.q_uuxuxx / eps;
    }
    return out;
}

// The seven controlling norms of the entropy production decomposition over
// (0, T) x grid, evaluated on the stored snapshots (pointwise eta(u) needs
// the fields, so the dense scalar log cannot be used here).
struct EntropyProductionReport {
    double grad_flux_l2 = 0.0;        // || eps eta'(u) u_x ||_L2
    double grad_square_l1 = 0.0;      // eps integral |eta''(u)| u_x^2
    double hess_flux_l2 = 0.0;        // || beta eta'(u) u_xx ||_L2
    double hess_cross_l1 = 0.0;       // beta integral |eta''(u) u_x u_xx|
    double u_hess_flux_l2 = 0.0;      // || B beta eta'(u) u u_xx ||_L2
    double u_cross_l1 = 0.0;          // |B| beta integral |eta''(u) u u_x u_xx|
    double grad_hess_l1 = 0.0;        // |C| beta integral |eta'(u) u_x u_xx|
};

inline EntropyProductionReport entropy_production_terms(const Trajectory& traj,
                                                        const EntropyPair& pair) {
    EntropyProductionReport rep;
    if (traj.snapshots.size() < 2) return rep;
    const KSParams& p = traj.params;
    const Grid& g = traj.grid;
    const double h = g.spacing;

    double s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
    std::vector<double> prev(7, 0.0);
    double prev_t = 0.0;
    for (std::size_t m = 0; m < traj.snapshots.size(); ++m) {
        const auto& [t, f] = traj.snapshots[m];
        const Field ux = spectral_derivative(f, 1);
        const Field uxx = spectral_derivative(f, 2);
        std::vector<double> cur(7, 0.0);
        for (std::size_t j = 0; j < g.n_points; ++j) {
            const double u = f[j];
            const double ep = pair.eta_prime(u);
            const double es = pair.eta_second(u);
            cur[0] += (p.eps * ep * ux[j]) * (p.eps * ep * ux[j]);
            cur[1] += p.eps * std::abs(es) * ux[j] * ux[j];
            cur[2] += (p.beta * ep * uxx[j]) * (p.beta * ep * uxx[j]);
            cur[3] += p.beta * std::abs(es * ux[j] * uxx[j]);
            cur[4] += (p.b_coeff * p.beta * ep * u * uxx[j]) * (p.b_coeff * p.beta * ep * u * uxx[j]);
            cur[5] += std::abs(p.b_coeff) * p.beta * std::abs(es * u * ux[j] * uxx[j]);
            cur[6] += std::abs(p.c_coeff) * p.beta * std::abs(ep * ux[j] * uxx[j]);
        }
        for (double& v : cur) v *= h;
        if (m > 0) {
            const double w = 0.5 * (t - prev_t);
            s1 += w * (prev[0] + cur[0]);
            s2 += w * (prev[1] + cur[1]);
            s3 += w * (prev[2] + cur[2]);
            s4 += w * (prev[3] + cur[3]);
            s5 += w * (prev[4] + cur[4]);
            s6 += w * (prev[5] + cur[5]);
            s7 += w * (prev[6] + cur[6]);
        }
        prev = cur;
        prev_t = t;
    }
    rep.grad_flux_l2 = std::sqrt(s1);
    rep.grad_square_l1 = s2;
    rep.hess_flux_l2 = std::sqrt(s3);
    rep.hess_cross_l1 = s4;
    rep.u_hess_flux_l2 = std::sqrt(s5);
    rep.u_cross_l1 = s6;
    rep.grad_hess_l1 = s7;
    return rep;
}

// ---------------------------------------------------------------------------
// Combined per-snapshot report.

struct EstimateRow {
    SnapshotFunctionals f;
    double diss1 = 0.0, diss2 = 0.0;
    double q_uxuxx = 0.0, q_uxx = 0.0, q_uuxx = 0.0, q_uuxuxx = 0.0;
};

struct EstimateReport {
    std::vector<EstimateRow> rows;
    RateQuantities rates;
};

inline EstimateReport build_estimate_report(const Trajectory& traj) {
    EstimateReport rep;
    rep.rates = rate_quantities(traj);
    const KSParams& p = traj.params;
    const auto& log = traj.step_log;
    if (log.empty()) return rep;

    const auto d1 = detail::cumulative_trapezoid(
        log, [&](const StepRecord& r) { return 2.0 * p.eps * r.grad_l2 * r.grad_l2; });
    const auto d2 = detail::cumulative_trapezoid(
        log, [&](const StepRecord& r) { return 2.0 * p.beta * p.eps * r.hess_l2 * r.hess_l2; });
    const auto iab =
        detail::cumulative_trapezoid(log, [](const StepRecord& r) { return r.ux_uxx_l1; });
    const auto ihh = detail::cumulative_trapezoid(
        log, [](const StepRecord& r) { return r.hess_l2 * r.hess_l2; });
    const auto iuu =
        detail::cumulative_trapezoid(log, [](const StepRecord& r) { return r.u_uxx_l2sq; });
    const auto itr =
        detail::cumulative_trapezoid(log, [](const StepRecord& r) { return r.u_ux_uxx_l1; });

    for (const auto& [t, f] : traj.snapshots) {
        const std::size_t i = detail::log_index_at(log, t);
        EstimateRow row;
        row.f = snapshot_functionals(f, p, t);
        row.diss1 = d1[i];
        row.diss2 = d2[i];
        row.q_uxuxx = p.beta * iab[i];
        row.q_uxx = p.beta * p.beta * ihh[i];
        row.q_uuxx = p.beta * p.beta * iuu[i];
        row.q_uuxuxx = p.beta * itr[i];
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace kslab
