#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kslab/config.hpp"
#include "kslab/csv.hpp"
#include "kslab/estimates.hpp"
#include "kslab/io.hpp"
#include "kslab/limit.hpp"

// Command-line entry point: subcommands simulate, burgers, check-estimates,
// limit, params. Exit codes: 0 success, 1 a PASS/FAIL report contains FAIL,
// 2 usage or configuration error.

namespace kslab::cli {

namespace fs = std::filesystem;

inline constexpr const char* kVersion = "kslab 1.0.0 (config schema 1)";

namespace detail {

inline fs::path default_out(const std::string& subcommand) {
    const char* root = std::getenv("KSLAB_OUT");
    fs::path base = root ? fs::path(root) : fs::path(".");
    return base / (subcommand + "_out");
}

inline void print_config_errors(const ConfigError& e) {
    std::cerr << "configuration error:\n";
    for (const auto& msg : e.errors) std::cerr << "  - " << msg << "\n";
}

inline std::vector<TestFunction> phi_battery(const Trajectory& traj, int count) {
    // bumps strictly inside (0, T) x (-L, L), spread across the active region
    const double T = traj.snapshots.back().first;
    const double L = traj.grid.half_length;
    std::vector<TestFunction> phis;
    const double x_lo = -0.5 * L, x_hi = 0.5 * L;
    for (int i = 0; i < count; ++i) {
        TestFunction phi;
        phi.t_center = 0.5 * T;
        phi.t_radius = 0.35 * T;
        phi.x_radius = 0.3 * (x_hi - x_lo);
        phi.x_center = (count == 1) ? 0.5 * (x_lo + x_hi)
                                    : x_lo + (x_hi - x_lo) * double(i) / double(count - 1);
        phis.push_back(phi);
    }
    return phis;
}

inline int run_simulate(const std::string& config_path, std::string out_dir,
                        bool allow_nonconservative) {
    const RunConfig cfg = parse_config(config_path);
    require_sections(cfg, true, true, true, true, false);
    SolverConfig solver = *cfg.solver;
    solver.allow_nonconservative = solver.allow_nonconservative || allow_nonconservative;
    Trajectory traj = simulate(*cfg.datum, *cfg.params, solver, *cfg.grid);
    if (out_dir.empty()) out_dir = default_out("simulate").string();
    io::write_run_dir(out_dir, traj);
    const auto& last = traj.step_log.back();
    std::cout << "run written to " << out_dir << "\n";
    std::cout << "status: " << (traj.status == RunStatus::completed ? "completed" : "blew_up")
              << ", steps: " << traj.step_count << ", final t = " << last.t
              << ", mass = " << csv::format_double(last.mass) << "\n";
    if (traj.boundary_contact)
        std::cout << "diagnostic: solution support reached the outer 10% of the domain at t = "
                  << traj.boundary_contact_time << "\n";
    return 0;
}

inline int run_burgers(const std::string& config_path, std::string out_dir) {
    const RunConfig cfg = parse_config(config_path);
    require_sections(cfg, true, true, true, true, false);
    const double a = cfg.params->a_coeff;
    Trajectory traj = burgers_solve(*cfg.datum, a, *cfg.grid, cfg.solver->t_final,
                                    cfg.solver->snapshot_times);
    if (out_dir.empty()) out_dir = default_out("burgers").string();
    io::write_run_dir(out_dir, traj);
    std::cout << "run written to " << out_dir << "\n";
    if (!cfg.entropy) return 0;

    const EntropySettings& es = *cfg.entropy;
    const Field datum_field = (cfg.datum->mollification_width > 0.0)
                                  ? mollify(*cfg.datum, *cfg.grid)
                                  : kslab::detail::sample_raw(*cfg.datum, *cfg.grid);
    const double tol_weak = 10.0 * cfg.grid->spacing;
    const double tol_entropy = 1e-8 + 10.0 * cfg.grid->spacing;

    std::ofstream report(fs::path(out_dir) / "entropy_report.csv");
    report << "phi_id,pair_kind,weak_residual,entropy_residual,verdict\n";
    bool any_fail = false;
    const auto phis = phi_battery(traj, es.phi_count);
    int phi_id = 0;
    for (const auto& phi : phis) {
        for (EntropyKind kind : es.pairs) {
            const EntropyPair pair = make_entropy_pair(kind, a, es.kruzhkov_k, es.kruzhkov_delta,
                                                       es.bump_center, es.bump_radius);
            const double wr = weak_form_residual(traj, a, datum_field, phi);
            const double er = entropy_residual(traj, pair, phi);
            const bool ok = std::abs(wr) <= tol_weak && er <= tol_entropy;
            any_fail = any_fail || !ok;
            report << phi_id << "," << pair.kind_name() << "," << csv::format_double(wr) << ","
                   << csv::format_double(er) << "," << (ok ? "PASS" : "FAIL") << "\n";
            std::cout << "phi " << phi_id << " / " << pair.kind_name() << ": weak "
                      << csv::format_double(wr) << ", entropy " << csv::format_double(er) << " -> "
                      << (ok ? "PASS" : "FAIL") << "\n";
        }
        ++phi_id;
    }
    return any_fail ? 1 : 0;
}

inline int run_check_estimates(const std::string& run_dir) {
    const Trajectory traj = io::load_run_dir(run_dir);
    const KSParams& p = traj.params;
    const EstimateReport rep = build_estimate_report(traj);

    csv::Table out;
    out.header = {"t",     "l2",    "l4",      "linf",  "grad_l2", "hess_l2", "energy",
                  "l4func", "diss1", "diss2",  "q_uxuxx", "q_uxx",  "q_uuxx",  "q_uuxuxx"};
    for (const auto& row : rep.rows)
        out.rows.push_back({row.f.t, row.f.l2, row.f.l4, row.f.linf, row.f.grad_l2, row.f.hess_l2,
                            row.f.energy, row.f.l4func, row.diss1, row.diss2, row.q_uxuxx,
                            row.q_uxx, row.q_uuxx, row.q_uuxuxx});
    csv::write((fs::path(run_dir) / "estimates.csv").string(), out);

    bool all_pass = true;
    auto report_line = [&](const std::string& name, bool pass, const std::string& detail) {
        all_pass = all_pass && pass;
        std::cout << name << (pass ? "  PASS  " : "  FAIL  ") << detail << "\n";
    };

    // energy bound: monotone decay plus closed dissipation budget
    if (p.energy_preserving()) {
        bool monotone = true;
        for (std::size_t i = 1; i < traj.step_log.size(); ++i) {
            const auto& r0 = traj.step_log[i - 1];
            const auto& r1 = traj.step_log[i];
            const double e0 = r0.l2 * r0.l2 + p.beta * r0.grad_l2 * r0.grad_l2;
            const double e1 = r1.l2 * r1.l2 + p.beta * r1.grad_l2 * r1.grad_l2;
            if (e1 > e0 + 1e-8) monotone = false;
        }
        double max_defect = 0.0;
        for (const auto& row : dissipation_budget(traj))
            max_defect = std::max(max_defect, std::abs(row.defect));
        const double tol = (p.eps > 0.0) ? 1e-5 : 1e-8;
        report_line("l-2", monotone && max_defect < tol,
                    "energy monotone: " + std::string(monotone ? "yes" : "no") +
                        ", budget defect " + csv::format_double(max_defect) + " (tol " +
                        csv::format_double(tol) + ")");
    } else {
        report_line("l-2", false, "coefficients are not energy preserving");
    }

    {
        std::size_t ok_count = 0;
        for (const auto& [t, f] : traj.snapshots)
            if (linf_bound_check(f, p).ok) ++ok_count;
        report_line("u-l-infty", ok_count == traj.snapshots.size(),
                    "interpolation bound holds on " + std::to_string(ok_count) + "/" +
                        std::to_string(traj.snapshots.size()) + " snapshots");
    }

    auto rate_line = [&](const std::string& name, double normalized) {
        report_line(name, std::isfinite(normalized) && normalized >= 0.0,
                    "normalized constant " + csv::format_double(normalized));
    };
    rate_line("ux-uxx", rep.rates.n_uxuxx);
    rate_line("uxx-l-2", rep.rates.n_uxx);
    rate_line("u-uxx-1", rep.rates.n_uuxx);
    rate_line("u-ux-uxx", rep.rates.n_uuxuxx);

    std::cout << (all_pass ? "overall: PASS" : "overall: FAIL") << "\n";
    return all_pass ? 0 : 1;
}

inline int run_limit(const std::string& config_path, std::string out_dir, int jobs,
                     double coupling_c_override) {
    const RunConfig cfg = parse_config(config_path);
    require_sections(cfg, true, true, true, true, true);
    SweepConfig sweep = cfg.make_sweep_config();
    sweep.jobs = jobs;
    if (coupling_c_override > 0.0) sweep.coupling_c = coupling_c_override;
    const SweepResult result = run_sweep(sweep);

    if (out_dir.empty()) out_dir = default_out("limit").string();
    fs::create_directories(out_dir);
    for (const auto& note : result.notes) std::cout << "note: " << note << "\n";

    csv::Table conv;
    conv.header = {"eps", "beta"};
    for (int p : sweep.p_exponents) conv.header.push_back("error_p" + std::to_string(p));
    conv.header.push_back("runtime_seconds");
    conv.header.push_back("failed");
    for (std::size_t i = 0; i < result.table.rows.size(); ++i) {
        const auto& row = result.table.rows[i];
        std::vector<double> cells = {row.eps, row.beta};
        for (int p : sweep.p_exponents)
            cells.push_back(row.errors.count(p) ? row.errors.at(p)
                                                : std::numeric_limits<double>::quiet_NaN());
        cells.push_back(row.runtime_seconds);
        cells.push_back(row.failed ? 1.0 : 0.0);
        conv.rows.push_back(cells);

        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu", i);
        io::write_run_dir(fs::path(out_dir) / name, result.runs[i]);
    }
    csv::write((fs::path(out_dir) / "convergence.csv").string(), conv);

    csv::Table orders;
    orders.header = {"p", "order", "residual", "no_convergence"};
    try {
        for (const auto& [p, est] : empirical_order(result.table))
            orders.rows.push_back({double(p), est.order, est.residual,
                                   est.no_convergence ? 1.0 : 0.0});
    } catch (const std::exception& e) {
        std::cout << "orders: " << e.what() << "\n";
    }
    csv::write((fs::path(out_dir) / "orders.csv").string(), orders);

    if (result.table.coupling_violated) std::cout << "flag: coupling_violated\n";
    std::cout << "eps        beta          ";
    for (int p : sweep.p_exponents) std::cout << "L" << p << "            ";
    std::cout << "\n";
    for (const auto& row : result.table.rows) {
        std::printf("%-10.4g %-13.6g ", row.eps, row.beta);
        for (int p : sweep.p_exponents) {
            if (row.errors.count(p))
                std::printf("%-14.6g ", row.errors.at(p));
            else
                std::printf("%-14s ", row.failed ? "failed" : "n/a");
        }
        std::printf("\n");
    }
    for (const auto& row : orders.rows)
        std::printf("empirical order (p=%d): %.4g (residual %.2g)%s\n", int(row[0]), row[1],
                    row[2], row[3] != 0.0 ? " [no_convergence]" : "");
    std::cout << "sweep written to " << out_dir << "\n";
    return 0;
}

inline int run_params(double a, bool have_n, int n, double alpha, const std::string& csv_path) {
    const auto [b, c] = energy_preserving_coefficients(a);
    KSParams p = make_energy_preserving_params(a, 0.0, 0.0);
    std::printf("A = %.17g\nB = %.17g\nC = %.17g\nD = 0\n", a, b, c);
    std::printf("constraint residuals: |A-B+C| = %.3g, |B+2C| = %.3g -> %s\n",
                std::abs(a - b + c), std::abs(b + 2 * c),
                verify_constraint_system(p) ? "energy preserving" : "NOT energy preserving");

    csv::Table table;
    table.header = {"a", "b", "c"};
    table.rows.push_back({a, b, c});

    if (have_n) {
        const AppendixProblem prob{n, alpha};
        const bool cert = two_roots_certificate(prob);
        std::printf("\ncoefficient family A = (C + alpha)^(2n), n = %d, alpha = %.17g\n", n, alpha);
        std::printf("g minimum at X0 = %.17g, g(X0) = %.17g\n", appendix_critical_point(prob),
                    appendix_g(appendix_critical_point(prob), prob));
        std::printf("two-roots certificate: %s (alpha threshold %.17g)\n",
                    cert ? "yes" : "no", alpha_lower_threshold(n));
        if (cert) {
            const AppendixRoots roots = appendix_roots(prob);
            std::printf("  X1 = %-22.17g -> A = %.17g%s\n", roots.x1, roots.a_from_x1,
                        roots.x1_is_boundary ? "  [boundary root, C = 0 excluded]" : "");
            std::printf("  X2 = %-22.17g -> A = %.17g%s\n", roots.x2, roots.a_from_x2,
                        roots.x2_is_boundary ? "  [boundary root, C = 0 excluded]" : "");
            table.header = {"a", "b", "c", "x1", "x2", "a_from_x1", "a_from_x2"};
            table.rows[0] = {a, b, c, roots.x1, roots.x2, roots.a_from_x1, roots.a_from_x2};
        } else {
            std::printf("  no real zeros: the family admits no coefficient for this alpha\n");
        }
        std::printf("odd companion family A = C^(2n+1): no real solution (C^(2n) + 3 >= 3)\n");
    }
    if (!csv_path.empty()) csv::write(csv_path, table);
    return 0;
}

}  // namespace detail

inline int dispatch(int argc, const char* const* argv) {
    CLI::App app{"numerical laboratory for a dispersive-diffusive regularization of the Burgers equation"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(0, 1);

    std::string config_path, out_dir, run_dir, csv_path;
    int jobs = 1;
    double a_coeff = 1.0;
    int n_exponent = 1;
    double alpha = 0.0;
    double coupling_c = 0.0;
    bool allow_nonconservative = false;

    auto* sim = app.add_subcommand("simulate", "integrate the regularized equation");
    sim->add_option("--config", config_path, "configuration file")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_flag("--allow-nonconservative", allow_nonconservative,
                  "run even when the coefficients break the energy constraints");

    auto* bur = app.add_subcommand("burgers", "entropy-solution reference run");
    bur->add_option("--config", config_path, "configuration file")->required();
    bur->add_option("--out", out_dir, "output directory");

    auto* chk = app.add_subcommand("check-estimates", "evaluate a priori bounds on a stored run");
    chk->add_option("--run", run_dir, "run directory produced by simulate")->required();

    auto* lim = app.add_subcommand("limit", "vanishing-regularization sweep");
    lim->add_option("--config", config_path, "configuration file")->required();
    lim->add_option("--out", out_dir, "output directory");
    lim->add_option("--jobs", jobs, "worker threads for sweep rows");
    lim->add_option("--coupling-c", coupling_c,
                    "override the coupling constant c in beta = c eps^4");

    auto* par = app.add_subcommand("params", "coefficient construction and certification");
    auto* opt_a = par->add_option("--a", a_coeff, "leading coefficient A");
    auto* opt_n = par->add_option("--n", n_exponent, "exponent n of the coefficient family");
    par->add_option("--alpha", alpha, "shift alpha of the coefficient family");
    par->add_option("--csv", csv_path, "optional CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return detail::run_simulate(config_path, out_dir, allow_nonconservative);
        if (bur->parsed()) return detail::run_burgers(config_path, out_dir);
        if (chk->parsed()) return detail::run_check_estimates(run_dir);
        if (lim->parsed()) return detail::run_limit(config_path, out_dir, jobs, coupling_c);
        if (par->parsed()) {
            if (!*opt_a && !*opt_n) {
                std::cerr << "params: give --a and/or --n\n";
                return 2;
            }
            return detail::run_params(a_coeff, bool(*opt_n), n_exponent, alpha, csv_path);
        }
    } catch (const ConfigError& e) {
        detail::print_config_errors(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    std::cout << app.help();
    return 2;
}

}  // namespace kslab::cli
