#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chorea/solver.hpp"

// Frequency sweeps over [0, N] with warm starts, and the closed-form rotating
// N-gon reference family scaled by |omega - k|^{-2/3}.

namespace chorea {

struct NGonOrbit {
    NGonLabel label;
    double omega = 0.0;
    double radius = 0.0;      // scaled vertex radius
    FourierLoop loop;         // single harmonic -k
};

inline NGonOrbit build_rotating_ngon(const NGonLabel& label, int n, double omega, int order = -1) {
    label.validate(n);
    if (std::abs(omega - label.k) < 1e-12)
        throw OmegaEqualsK("build_rotating_ngon: omega equals k, the family degenerates");
    NGonOrbit orb;
    orb.label = label;
    orb.omega = omega;
    const double scale = std::pow(std::abs(omega - label.k), -2.0 / 3.0);
    orb.radius = scale * ngon_radius(n);
    orb.loop = ngon_loop(label, n, scale, order);
    return orb;
}

struct FamilyTransition {
    int grid_index = 0;       // interval [grid_index, grid_index+1] flagged
    std::string reason;
};

struct DualityCheck {
    double action_rotating = 0.0;   // A_N value of the omega = N record
    double action_dual = 0.0;       // A value of a fresh omega = 0 solve in class xi*
    double relative_difference = 0.0;
};

struct FamilyRecord {
    SymmetryClass sym;
    SignPattern xi;
    int order = 0;
    int grid_points = 0;
    std::vector<double> omega_grid;
    std::vector<MinimizerRecord> records;
    std::vector<FamilyTransition> transitions;
    std::optional<DualityCheck> duality;
};

// Sequential warm-started sweep. Integer grid frequencies whose class matches
// an N-gon pattern run the divergence protocol instead of a minimization.
inline FamilyRecord sweep(const Problem& tmpl, const std::vector<double>& grid,
                          double seed_amplitude = 1.0) {
    if (grid.empty()) throw ConfigError("sweep: empty grid");
    for (size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1])) throw ConfigError("sweep: grid must be strictly increasing");
    if (grid.front() < -1e-12 || grid.back() > tmpl.sym.n + 1e-12)
        throw ConfigError("sweep: grid must lie inside [0, N]");

    FamilyRecord fam;
    fam.sym = tmpl.sym;
    fam.xi = tmpl.xi;
    fam.order = tmpl.order;
    fam.grid_points = tmpl.grid;
    fam.omega_grid = grid;

    std::optional<FourierLoop> warm;
    for (size_t gi = 0; gi < grid.size(); ++gi) {
        Problem p = tmpl;
        p.omega = grid[gi];
        p.fix_x_mean = Problem::omega_is_boundary(p.omega, p.sym.n);
        p.validate();

        FourierLoop start = warm ? *warm : initial_guess(p, seed_amplitude);
        if (warm) {
            start = project(start);
            if (p.fix_x_mean) start.a[0] = 0.0;
            start.c[0] = 0.0;
            const auto cls = classify(start);
            if (!cls || *cls != p.xi) start = initial_guess(p, seed_amplitude);
        }
        MinimizerRecord rec = minimize(p, start);
        if (rec.status == SolveStatus::Converged) {
            warm = rec.loop;
        } else {
            fam.transitions.push_back(
                {static_cast<int>(gi), std::string("status ") + to_string(rec.status) +
                                           " at omega=" + std::to_string(p.omega)});
            // do not warm-start across a failed or divergent grid point
            warm.reset();
        }
        fam.records.push_back(std::move(rec));
    }

    // flag large jumps between consecutive converged loops
    for (size_t gi = 0; gi + 1 < fam.records.size(); ++gi) {
        const auto& a = fam.records[gi];
        const auto& b = fam.records[gi + 1];
        if (a.status != SolveStatus::Converged || b.status != SolveStatus::Converged) continue;
        const SampledLoop sa = synthesize(a.loop, tmpl.grid);
        const SampledLoop sb = synthesize(b.loop, tmpl.grid);
        const double dist = loop_max_difference(sa, sb);
        const double scale = std::max(1.0, loop_diameter(sa));
        const double spacing = fam.omega_grid[gi + 1] - fam.omega_grid[gi];
        if (dist > 10.0 * spacing * scale)
            fam.transitions.push_back({static_cast<int>(gi), "loop jump " + std::to_string(dist)});
    }

    // omega = N duality: the rotating-frame minimizer seen inertially is an
    // omega = 0 minimizer in the * class, with equal action
    if (std::abs(fam.omega_grid.back() - tmpl.sym.n) < 1e-12 &&
        fam.records.back().status == SolveStatus::Converged) {
        Problem dual = tmpl;
        dual.omega = 0.0;
        dual.fix_x_mean = true;
        dual.xi = xi_star(tmpl.xi);
        if (dual.sym.kind != SymmetryKind::HN || hn_compatible(dual.xi, dual.sym.n)) {
            dual.validate();
            const MinimizerRecord drec = minimize(dual, initial_guess(dual, seed_amplitude));
            if (drec.status == SolveStatus::Converged) {
                DualityCheck dc;
                dc.action_rotating = fam.records.back().action.total;
                dc.action_dual = drec.action.total;
                dc.relative_difference = std::abs(dc.action_rotating - dc.action_dual) /
                                         std::max(1.0, std::abs(dc.action_dual));
                fam.duality = dc;
            }
        }
    }
    return fam;
}

}  // namespace chorea
