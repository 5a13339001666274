#pragma once

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chorea/continuation.hpp"
#include "chorea/diagnostics.hpp"
#include "chorea/log.hpp"

// Run configuration, trajectory CSV, orbit SVG and JSON manifests, plus the
// solve / sweep / verify commands behind the CLI.

namespace chorea {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
    int n = 3;
    std::string sym = "dn";  // dn | hn
    std::string xi = "+-";
    double omega = 0.0;
    bool has_grid = false;
    std::vector<double> grid;  // sweep frequencies
    int fourier_order = 24;
    int grid_points = 0;       // 0 -> 128 N
    double seed_amplitude = 1.0;
    std::string out_dir = "out";
    int jobs = 1;
    Tolerances tol;

    SymmetryClass symmetry() const {
        if (sym == "dn") return SymmetryClass(n, SymmetryKind::DN);
        if (sym == "hn") return SymmetryClass(n, SymmetryKind::HN);
        throw ConfigError("sym: expected 'dn' or 'hn', got '" + sym + "'");
    }

    Problem problem() const {
        Problem p = Problem::make(symmetry(), SignPattern::parse(xi, n), omega, fourier_order,
                                  grid_points);
        p.tol = tol;
        p.validate();
        return p;
    }
};

inline void config_from_json(RunConfig& cfg, const json& j) {
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("sym")) cfg.sym = j["sym"].get<std::string>();
    if (j.contains("xi")) cfg.xi = j["xi"].get<std::string>();
    if (j.contains("omega")) cfg.omega = j["omega"].get<double>();
    if (j.contains("grid")) {
        cfg.grid = j["grid"].get<std::vector<double>>();
        cfg.has_grid = true;
    }
    if (j.contains("fourier_order")) cfg.fourier_order = j["fourier_order"].get<int>();
    if (j.contains("grid_points")) cfg.grid_points = j["grid_points"].get<int>();
    if (j.contains("seed_amplitude")) cfg.seed_amplitude = j["seed_amplitude"].get<double>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        if (t.contains("grad_tol")) cfg.tol.grad_tol = t["grad_tol"].get<double>();
        if (t.contains("step_tol")) cfg.tol.step_tol = t["step_tol"].get<double>();
        if (t.contains("collision_dist")) cfg.tol.collision_dist = t["collision_dist"].get<double>();
        if (t.contains("max_iters")) cfg.tol.max_iters = t["max_iters"].get<int>();
    }
}

inline json config_to_json(const RunConfig& cfg) {
    json j;
    j["n"] = cfg.n;
    j["sym"] = cfg.sym;
    j["xi"] = cfg.xi;
    if (cfg.has_grid)
        j["grid"] = cfg.grid;
    else
        j["omega"] = cfg.omega;
    j["fourier_order"] = cfg.fourier_order;
    j["grid_points"] = cfg.grid_points;
    j["seed_amplitude"] = cfg.seed_amplitude;
    j["out"] = cfg.out_dir;
    j["jobs"] = cfg.jobs;
    j["tolerances"] = {{"grad_tol", cfg.tol.grad_tol},
                       {"step_tol", cfg.tol.step_tol},
                       {"collision_dist", cfg.tol.collision_dist},
                       {"max_iters", cfg.tol.max_iters}};
    return j;
}

// ---------------------------------------------------------------------------
// trajectory CSV: full period at grid resolution, rotating and inertial
// frames, full double precision.

inline std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_trajectory_csv(const std::string& path, const SampledLoop& sl, double omega) {
    SampledLoop work = sl;
    if (!work.has_velocities()) fill_velocities_spectral(work);
    const SampledLoop inertial = loop_to_inertial(work, omega);
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    f << "t";
    for (int i = 0; i < sl.n; ++i) f << ",x" << i << "_rot,y" << i << "_rot,z" << i << "_rot";
    for (int i = 0; i < sl.n; ++i) f << ",x" << i << "_in,y" << i << "_in,z" << i << "_in";
    f << "\n";
    for (int k = 0; k < sl.m; ++k) {
        f << format_full(sl.time(k));
        for (int i = 0; i < sl.n; ++i) {
            const Vec3 p = sl.nodes[k].body(i);
            f << "," << format_full(p.x) << "," << format_full(p.y) << "," << format_full(p.z);
        }
        for (int i = 0; i < sl.n; ++i) {
            const Vec3 p = inertial.nodes[k].body(i);
            f << "," << format_full(p.x) << "," << format_full(p.y) << "," << format_full(p.z);
        }
        f << "\n";
    }
}

struct TrajectoryData {
    SampledLoop rotating;
};

inline TrajectoryData read_trajectory_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path);
    std::string header;
    if (!std::getline(f, header)) throw ConfigError("empty trajectory file");
    int cols = 1;
    for (char c : header) cols += (c == ',');
    if ((cols - 1) % 6 != 0) throw ConfigError("trajectory header: expected 1 + 6N columns");
    const int n = (cols - 1) / 6;
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
        if (static_cast<int>(row.size()) != cols) throw ConfigError("trajectory row width mismatch");
        rows.push_back(std::move(row));
    }
    const int m = static_cast<int>(rows.size());
    require_grid(m, n);
    TrajectoryData td;
    td.rotating.n = n;
    td.rotating.m = m;
    td.rotating.nodes.assign(m, Configuration(n));
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < n; ++i)
            td.rotating.nodes[k].set_body(
                i, {rows[k][1 + 3 * i], rows[k][2 + 3 * i], rows[k][3 + 3 * i]});
    return td;
}

// ---------------------------------------------------------------------------
// orbit SVG: xy and yz projections of the generating curve with the body
// positions at t = 0.

inline void write_orbit_svg(const std::string& path, const SampledLoop& sl) {
    const int w = 420, h = 420, pad = 30;
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    auto panel = [&](int x0, double Vec3::*ca, double Vec3::*cb, const char* label) {
        double lo_a = 1e300, hi_a = -1e300, lo_b = 1e300, hi_b = -1e300;
        for (int k = 0; k < sl.m; ++k) {
            const Vec3 p = sl.nodes[k].body(0);
            lo_a = std::min(lo_a, p.*ca); hi_a = std::max(hi_a, p.*ca);
            lo_b = std::min(lo_b, p.*cb); hi_b = std::max(hi_b, p.*cb);
        }
        const double span = std::max({hi_a - lo_a, hi_b - lo_b, 1e-9});
        const double ca0 = 0.5 * (hi_a + lo_a), cb0 = 0.5 * (hi_b + lo_b);
        auto sx = [&](double v) { return x0 + pad + (w - 2 * pad) * (0.5 + (v - ca0) / span * 0.9); };
        auto sy = [&](double v) { return pad + (h - 2 * pad) * (0.5 - (v - cb0) / span * 0.9); };
        f << "<polyline fill=\"none\" stroke=\"#246\" stroke-width=\"1.5\" points=\"";
        for (int k = 0; k <= sl.m; ++k) {
            const Vec3 p = sl.nodes[k % sl.m].body(0);
            f << sx(p.*ca) << "," << sy(p.*cb) << " ";
        }
        f << "\"/>\n";
        for (int i = 0; i < sl.n; ++i) {
            const Vec3 p = sl.nodes[0].body(i);
            f << "<circle cx=\"" << sx(p.*ca) << "\" cy=\"" << sy(p.*cb)
              << "\" r=\"4\" fill=\"#c33\"/>\n";
        }
        f << "<text x=\"" << x0 + pad << "\" y=\"" << h - 8 << "\" font-size=\"12\">" << label
          << "</text>\n";
    };
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * w << "\" height=\"" << h
      << "\">\n";
    panel(0, &Vec3::x, &Vec3::y, "xy projection");
    panel(w, &Vec3::y, &Vec3::z, "yz projection");
    f << "</svg>\n";
}

// ---------------------------------------------------------------------------
// manifests

inline json action_to_json(const ActionValue& av) {
    return {{"total", av.total},
            {"kinetic_norm", av.kinetic},
            {"potential_integral", av.potential_integral},
            {"omega", av.omega}};
}

inline json diagnostics_to_json(const DiagnosticsReport& rep) {
    json j;
    j["eom_residual"] = rep.eom_residual;
    j["monotone_x"] = to_string(rep.monotone_x);
    j["monotone_z"] = to_string(rep.monotone_z);
    j["planarity"] = {{"normal", {rep.planarity.normal.x, rep.planarity.normal.y,
                                  rep.planarity.normal.z}},
                      {"residual", rep.planarity.residual},
                      {"xz_reflection_symmetric", rep.planarity.xz_reflection_symmetric}};
    j["collision"] = {{"min_distance", rep.collision.min_distance},
                      {"events", rep.collision.events.size()},
                      {"theorem_violation", rep.collision.theorem_violation}};
    j["boundary_violation"] = rep.boundary_violation;
    j["xi"] = rep.xi;
    if (rep.sundman)
        j["sundman"] = {{"exponent", rep.sundman->first}, {"C1", rep.sundman->second}};
    if (rep.regularizability) {
        const auto& r = *rep.regularizability;
        j["regularizability"] = {{"pass", r.pass},
                                 {"dphi", r.dphi},
                                 {"dtheta_mod", r.dtheta_mod},
                                 {"dE", r.dE},
                                 {"phidot", {r.before.phidot, r.after.phidot}},
                                 {"thetadot", {r.before.thetadot, r.after.thetadot}},
                                 {"center_c1_residual", r.center_c1_residual}};
    }
    return j;
}

inline json record_to_json(const MinimizerRecord& rec, const DiagnosticsReport* diag = nullptr) {
    json j;
    j["status"] = to_string(rec.status);
    j["action"] = action_to_json(rec.action);
    j["grad_norm"] = rec.grad_norm;
    j["iterations"] = rec.iterations;
    if (rec.shape_distance_to_ngon) j["shape_distance_to_ngon"] = *rec.shape_distance_to_ngon;
    if (rec.collision_report) {
        j["collision_report"] = {{"min_distance", rec.collision_report->min_distance},
                                 {"events", rec.collision_report->events.size()},
                                 {"theorem_violation", rec.collision_report->theorem_violation}};
    }
    if (rec.divergence) {
        j["divergence"] = {{"final_action", rec.divergence->final_action},
                           {"sup_norm", rec.divergence->sup_norm},
                           {"shape_distance", rec.divergence->shape_distance}};
    }
    if (diag) j["diagnostics"] = diagnostics_to_json(*diag);
    return j;
}

inline std::string timestamp_utc() {
    char buf[32];
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// deterministic content first; timestamps live only under "meta"
inline json manifest_skeleton(const RunConfig& cfg) {
    json j;
    j["config"] = config_to_json(cfg);
    j["meta"] = {{"tool", "chorea"}, {"version", kToolVersion}, {"created", timestamp_utc()}};
    return j;
}

// ---------------------------------------------------------------------------
// commands (exit codes: 0 solved/recorded, 2 config error, 3 infeasible seed)

inline int cmd_solve(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    Problem p;
    try {
        p = cfg.problem();
    } catch (const InfeasiblePattern& e) {
        CHOREA_LOG_ERROR("%s", e.what());
        return 3;
    } catch (const std::exception& e) {
        CHOREA_LOG_ERROR("config: %s", e.what());
        return 2;
    }
    FourierLoop seed;
    try {
        seed = initial_guess(p, cfg.seed_amplitude);
    } catch (const InfeasiblePattern& e) {
        CHOREA_LOG_ERROR("%s", e.what());
        return 3;
    }
    const MinimizerRecord rec = minimize(p, seed);
    fs::create_directories(cfg.out_dir);
    const SampledLoop sl = synthesize(rec.loop, p.grid);
    const DiagnosticsReport diag = run_diagnostics(sl, p.omega, p.tol.collision_dist);
    write_trajectory_csv(cfg.out_dir + "/trajectory.csv", sl, p.omega);
    write_orbit_svg(cfg.out_dir + "/orbit.svg", sl);
    json man = manifest_skeleton(cfg);
    man["record"] = record_to_json(rec, &diag);
    man["files"] = {{"trajectory", "trajectory.csv"}, {"orbit", "orbit.svg"}};
    std::ofstream(cfg.out_dir + "/manifest.json") << man.dump(2) << "\n";
    CHOREA_LOG_INFO("solve: status %s, action %.12g", to_string(rec.status), rec.action.total);
    return 0;
}

inline int cmd_sweep(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    if (!cfg.has_grid) {
        CHOREA_LOG_ERROR("sweep: no grid given");
        return 2;
    }
    Problem tmpl;
    try {
        RunConfig c0 = cfg;
        c0.omega = cfg.grid.front();
        tmpl = c0.problem();
    } catch (const InfeasiblePattern& e) {
        CHOREA_LOG_ERROR("%s", e.what());
        return 3;
    } catch (const std::exception& e) {
        CHOREA_LOG_ERROR("config: %s", e.what());
        return 2;
    }
    const FamilyRecord fam = sweep(tmpl, cfg.grid, cfg.seed_amplitude);
    fs::create_directories(cfg.out_dir);
    json man = manifest_skeleton(cfg);
    man["records"] = json::array();
    for (size_t gi = 0; gi < fam.records.size(); ++gi) {
        const auto& rec = fam.records[gi];
        char sub[64];
        std::snprintf(sub, sizeof(sub), "omega_%08.4f", fam.omega_grid[gi]);
        const std::string dir = cfg.out_dir + "/" + sub;
        fs::create_directories(dir);
        json rj = record_to_json(rec);
        rj["omega"] = fam.omega_grid[gi];
        if (rec.status == SolveStatus::Converged || rec.status == SolveStatus::Diverging) {
            const SampledLoop sl = synthesize(rec.loop, tmpl.grid);
            write_trajectory_csv(dir + "/trajectory.csv", sl, fam.omega_grid[gi]);
            write_orbit_svg(dir + "/orbit.svg", sl);
            if (rec.status == SolveStatus::Converged) {
                const DiagnosticsReport diag =
                    run_diagnostics(sl, fam.omega_grid[gi], tmpl.tol.collision_dist);
                rj["diagnostics"] = diagnostics_to_json(diag);
            }
            rj["files"] = {{"trajectory", std::string(sub) + "/trajectory.csv"},
                           {"orbit", std::string(sub) + "/orbit.svg"}};
        }
        man["records"].push_back(std::move(rj));
    }
    man["transitions"] = json::array();
    for (const auto& tr : fam.transitions)
        man["transitions"].push_back({{"interval", tr.grid_index}, {"reason", tr.reason}});
    if (fam.duality)
        man["duality"] = {{"action_rotating", fam.duality->action_rotating},
                          {"action_dual", fam.duality->action_dual},
                          {"relative_difference", fam.duality->relative_difference}};
    std::ofstream(cfg.out_dir + "/family.json") << man.dump(2) << "\n";
    CHOREA_LOG_INFO("sweep: %zu grid points, %zu transitions", fam.records.size(),
                    fam.transitions.size());
    return 0;
}

inline int cmd_verify(const std::string& csv_path, double omega, std::ostream& out) {
    TrajectoryData td;
    try {
        td = read_trajectory_csv(csv_path);
    } catch (const std::exception& e) {
        CHOREA_LOG_ERROR("verify: %s", e.what());
        return 2;
    }
    const DiagnosticsReport rep = run_diagnostics(td.rotating, omega);
    out << diagnostics_to_json(rep).dump(2) << "\n";
    return 0;
}

}  // namespace chorea
