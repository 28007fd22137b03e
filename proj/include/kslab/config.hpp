#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kslab/burgers.hpp"
#include "kslab/csv.hpp"
#include "kslab/grid.hpp"
#include "kslab/limit.hpp"
#include "kslab/params.hpp"
#include "kslab/solver.hpp"

// Structured-text run configuration, schema version 1. Sections: [grid],
// [params], [datum], [solver], [sweep], [entropy]; `key = value` lines,
// `#` comments, comma-separated lists. Unknown sections or keys are rejected
// and validation reports every error it finds, not only the first.

namespace kslab {

struct ConfigError : std::runtime_error {
    std::vector<std::string> errors;
    explicit ConfigError(std::vector<std::string> errs)
        : std::runtime_error(errs.empty() ? "config error" : errs.front()),
          errors(std::move(errs)) {}
};

struct EntropySettings {
    std::vector<EntropyKind> pairs{EntropyKind::square};
    double kruzhkov_k = 0.0;
    double kruzhkov_delta = 1e-3;
    double bump_center = 0.5;
    double bump_radius = 0.75;
    int phi_count = 5;
};

struct RunConfig {
    int version = 0;
    std::optional<Grid> grid;
    std::optional<KSParams> params;
    double coupling_c = 1.0;
    std::optional<InitialDatum> datum;
    std::optional<SolverConfig> solver;
    struct SweepSection {
        std::vector<double> eps_sequence;
        double coupling_c = 1.0;
        double coupling_exponent = 4.0;
        SpaceTimeWindow window;
        std::vector<int> p_exponents{1, 2, 3};
        ReferenceKind reference = ReferenceKind::godunov_fine;
        int refinement = 8;
        int window_snapshots = 21;
    };
    std::optional<SweepSection> sweep;
    std::optional<EntropySettings> entropy;

    SweepConfig make_sweep_config() const {
        if (!grid || !datum || !solver || !sweep || !params)
            throw std::logic_error("make_sweep_config: missing sections");
        SweepConfig cfg;
        cfg.grid = *grid;
        cfg.solver = *solver;
        cfg.datum = *datum;
        cfg.a_coeff = params->a_coeff;
        cfg.eps_sequence = sweep->eps_sequence;
        cfg.coupling_c = sweep->coupling_c;
        cfg.coupling_exponent = sweep->coupling_exponent;
        cfg.window = sweep->window;
        cfg.p_exponents = sweep->p_exponents;
        cfg.reference = sweep->reference;
        cfg.refinement = sweep->refinement;
        cfg.window_snapshots = sweep->window_snapshots;
        return cfg;
    }
};

namespace detail {

struct RawConfig {
    // section -> key -> (value, line number)
    std::map<std::string, std::map<std::string, std::pair<std::string, int>>> sections;
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

inline bool parse_int(const std::string& s, long& out) {
    try {
        std::size_t pos = 0;
        out = std::stol(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Typed access over one section with unknown-key detection.
class SectionReader {
public:
    SectionReader(const RawConfig& raw, const std::string& name, std::vector<std::string>& errors)
        : name_(name), errors_(errors) {
        auto it = raw.sections.find(name);
        if (it != raw.sections.end()) kv_ = &it->second;
    }

    bool present() const { return kv_ != nullptr; }

    std::optional<std::string> get(const std::string& key) {
        if (!kv_) return std::nullopt;
        seen_.insert(key);
        auto it = kv_->find(key);
        if (it == kv_->end()) return std::nullopt;
        return it->second.first;
    }

    std::optional<double> get_double(const std::string& key) {
        auto raw = get(key);
        if (!raw) return std::nullopt;
        double v;
        if (!parse_double(*raw, v)) {
            fail(key, "is not a number");
            return std::nullopt;
        }
        return v;
    }

    std::optional<long> get_int(const std::string& key) {
        auto raw = get(key);
        if (!raw) return std::nullopt;
        long v;
        if (!parse_int(*raw, v)) {
            fail(key, "is not an integer");
            return std::nullopt;
        }
        return v;
    }

    std::optional<bool> get_bool(const std::string& key) {
        auto raw = get(key);
        if (!raw) return std::nullopt;
        if (*raw == "true" || *raw == "1") return true;
        if (*raw == "false" || *raw == "0") return false;
        fail(key, "is not a boolean (true/false)");
        return std::nullopt;
    }

    std::optional<std::vector<double>> get_double_list(const std::string& key) {
        auto raw = get(key);
        if (!raw) return std::nullopt;
        std::vector<double> out;
        for (const auto& item : split_list(*raw)) {
            double v;
            if (!parse_double(item, v)) {
                fail(key, "contains a non-numeric entry '" + item + "'");
                return std::nullopt;
            }
            out.push_back(v);
        }
        return out;
    }

    void fail(const std::string& key, const std::string& what) {
        errors_.push_back("[" + name_ + "] " + key + " " + what);
    }

    void report_unknown_keys() {
        if (!kv_) return;
        for (const auto& [key, val] : *kv_)
            if (!seen_.count(key))
                errors_.push_back("[" + name_ + "] unknown key '" + key + "' (line " +
                                  std::to_string(val.second) + ")");
    }

private:
    std::string name_;
    std::vector<std::string>& errors_;
    const std::map<std::string, std::pair<std::string, int>>* kv_ = nullptr;
    std::set<std::string> seen_;
};

inline RawConfig read_raw(const std::string& path, std::vector<std::string>& errors) {
    RawConfig raw;
    std::ifstream in(path);
    if (!in) {
        errors.push_back("cannot open config file '" + path + "'");
        return raw;
    }
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            raw.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": empty key");
            continue;
        }
        auto& sec = raw.sections[section];
        if (sec.count(key))
            errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        sec[key] = {value, lineno};
    }
    return raw;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& path) {
    std::vector<std::string> errors;
    const detail::RawConfig raw = detail::read_raw(path, errors);
    if (!errors.empty() && raw.sections.empty()) throw ConfigError(std::move(errors));

    RunConfig cfg;

    static const std::set<std::string> known_sections = {"",      "grid",  "params",
                                                         "datum", "solver", "sweep", "entropy"};
    for (const auto& [name, kv] : raw.sections)
        if (!known_sections.count(name)) errors.push_back("unknown section [" + name + "]");

    {  // top level
        detail::SectionReader top(raw, "", errors);
        if (auto v = top.get_int("version")) {
            cfg.version = int(*v);
            if (cfg.version != 1)
                errors.push_back("unsupported config version " + std::to_string(cfg.version) +
                                 " (expected 1)");
        } else if (top.present()) {
            errors.push_back("missing top-level 'version = 1'");
        } else {
            errors.push_back("missing top-level 'version = 1'");
        }
        top.report_unknown_keys();
    }

    {  // [grid]
        detail::SectionReader sec(raw, "grid", errors);
        if (sec.present()) {
            const auto L = sec.get_double("half_length");
            const auto n = sec.get_int("n_points");
            if (L && n) {
                try {
                    cfg.grid = make_grid(*L, std::size_t(std::max(0L, *n)));
                } catch (const std::exception& e) {
                    sec.fail("", e.what());
                }
            } else {
                if (!L) sec.fail("half_length", "is required");
                if (!n) sec.fail("n_points", "is required");
            }
            sec.report_unknown_keys();
        }
    }

    {  // [params]
        detail::SectionReader sec(raw, "params", errors);
        if (sec.present()) {
            const auto a = sec.get_double("a");
            const auto eps = sec.get_double("eps");
            const auto beta = sec.get_double("beta");
            const auto cc = sec.get_double("coupling_c");
            const auto b = sec.get_double("b");
            const auto c = sec.get_double("c");
            const auto d = sec.get_double("d");
            if (!a) sec.fail("a", "is required");
            if (eps && *eps < 0.0) sec.fail("eps", "must be nonnegative");
            if (beta && *beta < 0.0) sec.fail("beta", "must be nonnegative");
            if (beta && cc) sec.fail("beta", "conflicts with coupling_c (give one)");
            const double eps_v = eps.value_or(0.0);
            double beta_v = 0.0;
            if (beta) {
                beta_v = *beta;
                if (eps_v == 0.0 && beta_v > 0.0)
                    sec.fail("beta", "positive with eps = 0: the coupling is undefined");
            } else if (eps_v > 0.0) {
                cfg.coupling_c = cc.value_or(1.0);
                if (!(cfg.coupling_c > 0.0))
                    sec.fail("coupling_c", "must be positive");
                else
                    beta_v = coupling_beta(eps_v, cfg.coupling_c);
            } else if (cc && eps_v == 0.0) {
                sec.fail("coupling_c", "given with eps = 0: the coupling is undefined");
            }
            if (a) {
                KSParams p = make_energy_preserving_params(*a, std::max(0.0, eps_v),
                                                           std::max(0.0, beta_v));
                if (b) p.b_coeff = *b;
                if (c) p.c_coeff = *c;
                if (d) p.d_coeff = *d;
                cfg.params = p;
            }
            sec.report_unknown_keys();
        }
    }

    {  // [datum]
        detail::SectionReader sec(raw, "datum", errors);
        if (sec.present()) {
            const auto kind = sec.get("kind");
            InitialDatum datum;
            bool ok = true;
            if (!kind) {
                sec.fail("kind", "is required (riemann_step or gaussian)");
                ok = false;
            } else if (*kind == "riemann_step") {
                RiemannStepDatum d;
                const auto ul = sec.get_double("u_left");
                const auto ur = sec.get_double("u_right");
                if (!ul || !ur) {
                    sec.fail("u_left/u_right", "are required for riemann_step");
                    ok = false;
                } else {
                    d.left_value = *ul;
                    d.right_value = *ur;
                }
                d.transition_width = sec.get_double("transition_width").value_or(0.0);
                d.support_radius = sec.get_double("support_radius").value_or(4.0);
                if (!(d.support_radius > 0.0)) sec.fail("support_radius", "must be positive");
                datum.kind = d;
            } else if (*kind == "gaussian") {
                GaussianDatum d;
                const auto amp = sec.get_double("amplitude");
                const auto width = sec.get_double("width");
                if (!amp || !width) {
                    sec.fail("amplitude/width", "are required for gaussian");
                    ok = false;
                } else {
                    d.amplitude = *amp;
                    d.width = *width;
                    if (!(d.width > 0.0)) sec.fail("width", "must be positive");
                }
                d.center = sec.get_double("center").value_or(0.0);
                datum.kind = d;
            } else {
                sec.fail("kind", "must be riemann_step or gaussian");
                ok = false;
            }
            datum.mollification_width = sec.get_double("mollification_width").value_or(0.0);
            if (ok) cfg.datum = datum;
            sec.report_unknown_keys();
        }
    }

    {  // [solver]
        detail::SectionReader sec(raw, "solver", errors);
        if (sec.present()) {
            SolverConfig s;
            const auto tf = sec.get_double("t_final");
            if (!tf)
                sec.fail("t_final", "is required");
            else if (!(*tf > 0.0))
                sec.fail("t_final", "must be positive");
            else
                s.t_final = *tf;
            s.snapshot_times = sec.get_double_list("snapshot_times").value_or(
                std::vector<double>{s.t_final});
            for (double t : s.snapshot_times)
                if (t < 0.0 || t > s.t_final * (1.0 + 1e-12)) {
                    sec.fail("snapshot_times", "must lie inside [0, t_final]");
                    break;
                }
            s.cfl_advective = sec.get_double("cfl_advective").value_or(0.5);
            s.cfl_dispersive = sec.get_double("cfl_dispersive").value_or(0.5);
            if (!(s.cfl_advective > 0.0) || s.cfl_advective > 1.0)
                sec.fail("cfl_advective", "must lie in (0, 1]");
            if (!(s.cfl_dispersive > 0.0) || s.cfl_dispersive > 1.0)
                sec.fail("cfl_dispersive", "must lie in (0, 1]");
            s.dealias_fraction = sec.get_double("dealias_fraction").value_or(2.0 / 3.0);
            if (!(s.dealias_fraction > 0.0) || s.dealias_fraction > 1.0)
                sec.fail("dealias_fraction", "must lie in (0, 1]");
            s.max_dt = sec.get_double("max_dt").value_or(0.0);
            s.allow_nonconservative = sec.get_bool("allow_nonconservative").value_or(false);
            cfg.solver = s;
            sec.report_unknown_keys();
        }
    }

    {  // [sweep]
        detail::SectionReader sec(raw, "sweep", errors);
        if (sec.present()) {
            RunConfig::SweepSection sw;
            if (auto seq = sec.get_double_list("eps_sequence")) {
                sw.eps_sequence = *seq;
                for (std::size_t i = 0; i < sw.eps_sequence.size(); ++i) {
                    if (!(sw.eps_sequence[i] > 0.0)) {
                        sec.fail("eps_sequence", "entries must be positive");
                        break;
                    }
                    if (i > 0 && !(sw.eps_sequence[i] < sw.eps_sequence[i - 1])) {
                        sec.fail("eps_sequence", "must be strictly decreasing");
                        break;
                    }
                }
            } else {
                sec.fail("eps_sequence", "is required");
            }
            sw.coupling_c = sec.get_double("coupling_c").value_or(1.0);
            if (!(sw.coupling_c > 0.0)) sec.fail("coupling_c", "must be positive");
            sw.coupling_exponent = sec.get_double("coupling_exponent").value_or(4.0);
            sw.window.t_min = sec.get_double("window_t_min").value_or(0.0);
            sw.window.t_max = sec.get_double("window_t_max").value_or(0.0);
            sw.window.x_min = sec.get_double("window_x_min").value_or(0.0);
            sw.window.x_max = sec.get_double("window_x_max").value_or(0.0);
            if (!(sw.window.t_min < sw.window.t_max))
                sec.fail("window_t_min/window_t_max", "must satisfy t_min < t_max");
            if (!(sw.window.x_min < sw.window.x_max))
                sec.fail("window_x_min/window_x_max", "must satisfy x_min < x_max");
            if (auto ps = sec.get_double_list("p_exponents")) {
                sw.p_exponents.clear();
                for (double pv : *ps) {
                    const int p = int(pv);
                    if (double(p) != pv || p < 1 || p > 3) {
                        sec.fail("p_exponents",
                                 "must be integers with 1 <= p < 4 (got " +
                                     csv::format_double(pv) + ")");
                        continue;
                    }
                    sw.p_exponents.push_back(p);
                }
            }
            if (auto ref = sec.get("reference")) {
                if (*ref == "godunov_fine")
                    sw.reference = ReferenceKind::godunov_fine;
                else if (*ref == "riemann_exact")
                    sw.reference = ReferenceKind::riemann_exact;
                else if (*ref == "self_check")
                    sw.reference = ReferenceKind::self_check;
                else
                    sec.fail("reference", "must be godunov_fine, riemann_exact or self_check");
            }
            sw.refinement = int(sec.get_int("refinement").value_or(8));
            if (sw.refinement < 1) sec.fail("refinement", "must be at least 1");
            sw.window_snapshots = int(sec.get_int("window_snapshots").value_or(21));
            if (sw.window_snapshots < 2) sec.fail("window_snapshots", "must be at least 2");
            cfg.sweep = sw;
            sec.report_unknown_keys();
        }
    }

    {  // [entropy]
        detail::SectionReader sec(raw, "entropy", errors);
        if (sec.present()) {
            EntropySettings e;
            if (auto pairs = sec.get("pairs")) {
                e.pairs.clear();
                for (const auto& name : detail::split_list(*pairs)) {
                    if (name == "square")
                        e.pairs.push_back(EntropyKind::square);
                    else if (name == "kruzhkov" || name == "kruzhkov_smoothed")
                        e.pairs.push_back(EntropyKind::kruzhkov_smoothed);
                    else if (name == "bump" || name == "compact_bump")
                        e.pairs.push_back(EntropyKind::compact_bump);
                    else
                        sec.fail("pairs", "unknown pair kind '" + name + "'");
                }
            }
            e.kruzhkov_k = sec.get_double("kruzhkov_k").value_or(0.0);
            e.kruzhkov_delta = sec.get_double("kruzhkov_delta").value_or(1e-3);
            if (!(e.kruzhkov_delta > 0.0)) sec.fail("kruzhkov_delta", "must be positive");
            e.bump_center = sec.get_double("bump_center").value_or(0.5);
            e.bump_radius = sec.get_double("bump_radius").value_or(0.75);
            if (!(e.bump_radius > 0.0)) sec.fail("bump_radius", "must be positive");
            e.phi_count = int(sec.get_int("phi_count").value_or(5));
            if (e.phi_count < 1) sec.fail("phi_count", "must be at least 1");
            cfg.entropy = e;
            sec.report_unknown_keys();
        }
    }

    // cross-section checks
    if (cfg.sweep && cfg.grid) {
        if (cfg.sweep->window.x_min < -cfg.grid->half_length ||
            cfg.sweep->window.x_max > cfg.grid->half_length)
            errors.push_back("[sweep] window must lie inside the spatial domain");
    }
    if (cfg.sweep && cfg.solver) {
        if (cfg.sweep->window.t_max > cfg.solver->t_final * (1.0 + 1e-12))
            errors.push_back("[sweep] window_t_max exceeds t_final");
    }

    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

inline void require_sections(const RunConfig& cfg, bool need_grid, bool need_params,
                             bool need_datum, bool need_solver, bool need_sweep) {
    std::vector<std::string> errors;
    if (need_grid && !cfg.grid) errors.push_back("missing required section [grid]");
    if (need_params && !cfg.params) errors.push_back("missing required section [params]");
    if (need_datum && !cfg.datum) errors.push_back("missing required section [datum]");
    if (need_solver && !cfg.solver) errors.push_back("missing required section [solver]");
    if (need_sweep && !cfg.sweep) errors.push_back("missing required section [sweep]");
    if (!errors.empty()) throw ConfigError(std::move(errors));
}

}  // namespace kslab
