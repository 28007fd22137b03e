#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kslab/csv.hpp"
#include "kslab/estimates.hpp"
#include "kslab/grid.hpp"
#include "kslab/solver.hpp"

// On-disk layout of one run directory:
//   params.csv      a,b,c,d,beta,eps
//   snapshots.csv   index,t          (snapshot m lives in snap_<index>.csv)
//   snap_NNNN.csv   x,u
//   invariants.csv  t,mass,E,dissipation_integral,linf
//   steplog.csv     full per-step record
//   status.txt      completed / blew_up plus diagnostics

namespace kslab::io {

namespace fs = std::filesystem;

inline std::string snapshot_filename(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%04zu.csv", index);
    return buf;
}

inline void write_field_csv(const std::string& path, const Field& f) {
    csv::Table t;
    t.header = {"x", "u"};
    t.rows.reserve(f.size());
    for (std::size_t j = 0; j < f.size(); ++j)
        t.rows.push_back({f.grid.node(j), f[j]});
    csv::write(path, t);
}

inline Field read_field_csv(const std::string& path) {
    const csv::Table t = csv::read(path);
    if (t.header != std::vector<std::string>{"x", "u"})
        throw std::runtime_error("field csv: unexpected header in " + path);
    if (t.rows.empty()) throw std::runtime_error("field csv: no rows in " + path);
    const double half_length = -t.rows.front()[0];
    const Grid g = make_grid(half_length, t.rows.size());
    std::vector<double> values(t.rows.size());
    for (std::size_t j = 0; j < t.rows.size(); ++j) values[j] = t.rows[j][1];
    return Field(g, std::move(values));
}

inline void write_run_dir(const fs::path& dir, const Trajectory& traj) {
    fs::create_directories(dir);

    csv::Table params;
    params.header = {"a", "b", "c", "d", "beta", "eps"};
    params.rows.push_back({traj.params.a_coeff, traj.params.b_coeff, traj.params.c_coeff,
                           traj.params.d_coeff, traj.params.beta, traj.params.eps});
    csv::write((dir / "params.csv").string(), params);

    csv::Table manifest;
    manifest.header = {"index", "t"};
    for (std::size_t m = 0; m < traj.snapshots.size(); ++m) {
        manifest.rows.push_back({double(m), traj.snapshots[m].first});
        write_field_csv((dir / snapshot_filename(m)).string(), traj.snapshots[m].second);
    }
    csv::write((dir / "snapshots.csv").string(), manifest);

    const double eps = traj.params.eps, beta = traj.params.beta;
    csv::Table inv;
    inv.header = {"t", "mass", "E", "dissipation_integral", "linf"};
    double diss = 0.0;
    for (std::size_t i = 0; i < traj.step_log.size(); ++i) {
        const StepRecord& r = traj.step_log[i];
        if (i > 0) {
            const StepRecord& q = traj.step_log[i - 1];
            const double f0 = 2.0 * eps * q.grad_l2 * q.grad_l2 +
                              2.0 * beta * eps * q.hess_l2 * q.hess_l2;
            const double f1 = 2.0 * eps * r.grad_l2 * r.grad_l2 +
                              2.0 * beta * eps * r.hess_l2 * r.hess_l2;
            diss += 0.5 * (f0 + f1) * (r.t - q.t);
        }
        inv.rows.push_back({r.t, r.mass, r.l2 * r.l2 + beta * r.grad_l2 * r.grad_l2, diss, r.linf});
    }
    csv::write((dir / "invariants.csv").string(), inv);

    csv::Table log;
    log.header = {"t",       "dt",      "mass",       "linf",      "l2",         "l4",
                  "grad_l2", "hess_l2", "ux_uxx_l1",  "u_uxx_l2sq", "u_ux_l2sq", "u_ux_uxx_l1"};
    for (const StepRecord& r : traj.step_log)
        log.rows.push_back({r.t, r.dt, r.mass, r.linf, r.l2, r.l4, r.grad_l2, r.hess_l2,
                            r.ux_uxx_l1, r.u_uxx_l2sq, r.u_ux_l2sq, r.u_ux_uxx_l1});
    csv::write((dir / "steplog.csv").string(), log);

    std::ofstream status(dir / "status.txt");
    status << (traj.status == RunStatus::completed ? "completed" : "blew_up") << "\n";
    if (traj.status == RunStatus::blew_up) status << "blowup_time " << traj.blowup_time << "\n";
    if (traj.boundary_contact)
        status << "boundary_contact_time " << traj.boundary_contact_time << "\n";
    status << "steps " << traj.step_count << "\n";
}

inline Trajectory load_run_dir(const fs::path& dir) {
    Trajectory traj;

    const csv::Table params = csv::read((dir / "params.csv").string());
    if (params.rows.size() != 1 || params.rows[0].size() != 6)
        throw std::runtime_error("load_run_dir: malformed params.csv");
    const auto& p = params.rows[0];
    traj.params = KSParams{p[0], p[1], p[2], p[3], p[4], p[5]};

    const csv::Table manifest = csv::read((dir / "snapshots.csv").string());
    for (const auto& row : manifest.rows) {
        Field f = read_field_csv((dir / snapshot_filename(std::size_t(row[0]))).string());
        traj.grid = f.grid;
        traj.snapshots.emplace_back(row[1], std::move(f));
    }
    if (traj.snapshots.empty()) throw std::runtime_error("load_run_dir: no snapshots");

    const csv::Table log = csv::read((dir / "steplog.csv").string());
    for (const auto& row : log.rows) {
        if (row.size() != 12) throw std::runtime_error("load_run_dir: malformed steplog.csv");
        StepRecord r;
        r.t = row[0];
        r.dt = row[1];
        r.mass = row[2];
        r.linf = row[3];
        r.l2 = row[4];
        r.l4 = row[5];
        r.grad_l2 = row[6];
        r.hess_l2 = row[7];
        r.ux_uxx_l1 = row[8];
        r.u_uxx_l2sq = row[9];
        r.u_ux_l2sq = row[10];
        r.u_ux_uxx_l1 = row[11];
        traj.step_log.push_back(r);
    }
    traj.step_count = traj.step_log.empty() ? 0 : traj.step_log.size() - 1;

    std::ifstream status(dir / "status.txt");
    std::string word;
    if (status >> word && word == "blew_up") traj.status = RunStatus::blew_up;
    return traj;
}

}  // namespace kslab::io
