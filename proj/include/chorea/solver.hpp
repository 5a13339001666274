#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "chorea/action.hpp"
#include "chorea/deform.hpp"
#include "chorea/ngon.hpp"

// Minimization of A_omega inside a symmetry class and a topological class:
// limited-memory quasi-Newton descent on the free Fourier coefficients with
// Armijo backtracking, checkpoint-sign preservation by step rejection, a
// collision monitor, and divergence detection for the non-coercive integer
// frequencies.

namespace chorea {

struct Tolerances {
    double grad_tol = 1e-8;
    double step_tol = 1e-12;
    double collision_dist = 1e-4;
    int max_iters = 20000;
};

struct Problem {
    SymmetryClass sym;
    SignPattern xi;
    double omega = 0.0;
    bool fix_x_mean = true;   // required exactly when omega is 0 or N
    bool fix_z_mean = true;   // always required
    int order = 24;           // F
    int grid = 0;             // M; defaults to 128 N
    Tolerances tol;

    // divergence protocol thresholds
    double divergence_action_floor = 1e-3;
    double divergence_size_factor = 50.0;
    double divergence_shape_tol = 1e-3;

    static bool omega_is_boundary(double omega, int n) {
        return std::abs(omega) < 1e-12 || std::abs(omega - n) < 1e-12;
    }

    static Problem make(const SymmetryClass& sym, const SignPattern& xi, double omega,
                        int order = 24, int grid = 0) {
        Problem p;
        p.sym = sym;
        p.xi = xi;
        p.omega = omega;
        p.fix_x_mean = omega_is_boundary(omega, sym.n);
        p.order = std::max(order, sym.n - 1);
        p.grid = grid > 0 ? grid : 128 * sym.n;
        return p;
    }

    void validate() const {
        if (!fix_z_mean) throw ConfigError("Problem: the z mean constraint is always required");
        if (fix_x_mean != omega_is_boundary(omega, sym.n))
            throw ConfigError("Problem: [x_0]=0 is required exactly at omega in {0, N}");
        if (static_cast<int>(xi.xi.size()) != sym.n - 1)
            throw ConfigError("Problem: xi length must be N-1");
        if (sym.kind == SymmetryKind::HN) {
            if (!hn_compatible(xi, sym.n))
                throw InfeasiblePattern("Problem: xi is not compatible with the H_N symmetry");
            if (std::abs(omega) > 1e-12 && sym.n % 2 == 0)
                throw ConfigError("Problem: H_N with even N admits no rotating frame");
        }
        require_grid(grid, sym.n);
        if (grid <= 2 * order) throw ConfigError("Problem: need M > 2F");
        if (omega < -1e-12 || omega > sym.n + 1e-12)
            throw ConfigError("Problem: omega outside [0, N]; apply normalize_omega first");
    }
};

// Reduction of an arbitrary frequency to [0, N]: q minimizes A_omega in the
// xi class iff e^{-2mN J t} q minimizes A_{omega - 2mN} (full turns of the
// frame), and iff the y-reflected loop minimizes A_{-omega} in the negated
// class. Solving happens at the reduced frequency; restore_loop maps back.
struct OmegaReduction {
    int turns = 0;         // m: the solve happens at omega - 2mN
    bool conjugated = false;
    double omega = 0.0;    // the reduced frequency in [0, N]
};

inline OmegaReduction normalize_omega(double omega, int n) {
    OmegaReduction r;
    r.turns = static_cast<int>(std::llround(omega / (2.0 * n)));
    double w = omega - 2.0 * n * r.turns;
    if (w < 0) {
        r.conjugated = true;
        w = -w;
    }
    r.omega = w;
    return r;
}

inline SignPattern reduced_pattern(const SignPattern& xi, const OmegaReduction& red) {
    return red.conjugated ? negate(xi) : xi;
}

// Maps a loop solved at the reduced frequency back to the original frame:
// the minimizer of A_{omega' + 2mN} is e^{-2mN J t} times the minimizer of
// A_{omega'}, with the mode shift cancelling the frequency shift exactly.
inline FourierLoop restore_loop(const FourierLoop& fl, const OmegaReduction& red, int n) {
    FourierLoop out = red.conjugated ? conjugate_loop(fl) : fl;
    if (red.turns != 0) out = shift_frame(out, -2 * n * red.turns);
    return out;
}

enum class SolveStatus { Converged, CollisionCandidate, Diverging, IterLimit };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::CollisionCandidate: return "CollisionCandidate";
        case SolveStatus::Diverging: return "Diverging";
        case SolveStatus::IterLimit: return "IterLimit";
    }
    return "?";
}

struct CollisionEvent {
    int node = 0;
    double t = 0.0;
    int i = 0, j = 0;
    double distance = 0.0;
    bool at_checkpoint = false;
    bool allowed = false;  // admissible pair at this checkpoint moment
};

struct CollisionReport {
    std::vector<CollisionEvent> events;
    std::vector<double> checkpoint_min_distance;  // per moment l pi/N, l = 0..2N-1
    double min_distance = 0.0;
    bool theorem_violation = false;  // near-collision off-moment or disallowed pair

    bool empty() const { return events.empty(); }
};

// Admissible binary-collision pairs at the moment l pi/N: {i, N-i} shifted by
// the choreography for even l, {i, N-1-i} shifted for odd l.
inline bool collision_pair_allowed(int n, int ell, int b1, int b2) {
    const int shift = ((ell % (2 * n)) + 2 * n) % (2 * n) / 2;
    if (ell % 2 == 0) {
        for (int i = 1; i <= (n - 1) / 2; ++i) {
            const int p1 = (i + shift) % n, p2 = (n - i + shift) % n;
            if ((b1 == p1 && b2 == p2) || (b1 == p2 && b2 == p1)) return true;
        }
    } else {
        for (int i = 0; i <= n / 2 - 1; ++i) {
            const int p1 = (i + shift) % n, p2 = (n - 1 - i + shift) % n;
            if ((b1 == p1 && b2 == p2) || (b1 == p2 && b2 == p1)) return true;
        }
    }
    return false;
}

inline CollisionReport collision_monitor(const SampledLoop& sl, double near_dist = 1e-4) {
    require_grid(sl.m, sl.n);
    CollisionReport rep;
    const int stride = sl.m / (2 * sl.n);
    rep.checkpoint_min_distance.assign(2 * sl.n, std::numeric_limits<double>::infinity());
    rep.min_distance = std::numeric_limits<double>::infinity();
    for (int k = 0; k < sl.m; ++k) {
        const bool at_cp = (k % stride == 0);
        const int ell = at_cp ? k / stride : -1;
        for (int i = 0; i < sl.n; ++i)
            for (int j = i + 1; j < sl.n; ++j) {
                const double d = body_distance(sl.nodes[k], i, j);
                rep.min_distance = std::min(rep.min_distance, d);
                if (at_cp)
                    rep.checkpoint_min_distance[ell] =
                        std::min(rep.checkpoint_min_distance[ell], d);
                if (d < near_dist) {
                    CollisionEvent ev;
                    ev.node = k;
                    ev.t = sl.time(k);
                    ev.i = i;
                    ev.j = j;
                    ev.distance = d;
                    ev.at_checkpoint = at_cp;
                    ev.allowed = at_cp && collision_pair_allowed(sl.n, ell, i, j);
                    if (!ev.allowed) rep.theorem_violation = true;
                    rep.events.push_back(ev);
                }
            }
    }
    return rep;
}

struct DivergenceEvidence {
    double final_action = 0.0;
    double sup_norm = 0.0;
    double shape_distance = 0.0;     // sup-norm distance of q/|q| to the rotating N-gon direction
    NGonLabel label;
    std::vector<double> action_trace;
};

// Normalized sup distance between the loop and e^{-J k t} Ngon / |Ngon|.
inline double ngon_shape_distance(const SampledLoop& sl, const NGonLabel& label) {
    const Configuration ref = build_ngon(label, sl.n);
    double refnorm = 0.0;
    for (int i = 0; i < sl.n; ++i) refnorm += std::norm(ref.zeta[i]);
    refnorm = std::sqrt(refnorm);
    double worst = 0.0;
    for (int k = 0; k < sl.m; ++k) {
        double qn = 0.0;
        for (int i = 0; i < sl.n; ++i)
            qn += std::norm(sl.nodes[k].zeta[i]) + sl.nodes[k].z[i] * sl.nodes[k].z[i];
        qn = std::sqrt(qn);
        if (qn < 1e-300) return std::numeric_limits<double>::infinity();
        const Cplx rot = std::exp(Cplx{0.0, -double(label.k) * sl.time(k)});
        double d2 = 0.0;
        for (int i = 0; i < sl.n; ++i) {
            const Cplx dz = sl.nodes[k].zeta[i] / qn - rot * ref.zeta[i] / refnorm;
            d2 += std::norm(dz) + (sl.nodes[k].z[i] / qn) * (sl.nodes[k].z[i] / qn);
        }
        worst = std::max(worst, std::sqrt(d2));
    }
    return worst;
}

// Matching rotating N-gon label for the divergence protocol, if any: omega an
// integer k in [1, N-1] coprime with N whose pattern equals xi.
inline std::optional<NGonLabel> divergence_label(const Problem& p) {
    const double w = p.omega;
    const int k = static_cast<int>(std::llround(w));
    if (std::abs(w - k) > 1e-12) return std::nullopt;
    if (k < 1 || k > p.sym.n - 1 || gcd_ll(k, p.sym.n) != 1) return std::nullopt;
    for (int sign : {+1, -1}) {
        NGonLabel label{k, sign};
        if (ngon_pattern(label, p.sym.n) == p.xi) return label;
    }
    return std::nullopt;
}

// History-based divergence check: loop norm grows while the action decreases
// monotonically toward zero, and the normalized shape approaches the rotating
// N-gon of the matching label.
inline std::optional<DivergenceEvidence> divergence_detector(
    const std::deque<std::pair<double, double>>& history,  // (action, sup-norm) of accepted steps
    const SampledLoop& current, const Problem& p) {
    const auto label = divergence_label(p);
    if (!label) return std::nullopt;
    if (history.size() < 2) return std::nullopt;
    for (size_t i = 1; i < history.size(); ++i)
        if (history[i].first > history[i - 1].first + 1e-12) return std::nullopt;
    const double action = history.back().first;
    const double sup = history.back().second;
    if (action > p.divergence_action_floor) return std::nullopt;
    if (sup < p.divergence_size_factor * std::max(1.0, history.front().second))
        return std::nullopt;
    const double shape = ngon_shape_distance(current, *label);
    if (shape > p.divergence_shape_tol) return std::nullopt;
    DivergenceEvidence ev;
    ev.final_action = action;
    ev.sup_norm = sup;
    ev.shape_distance = shape;
    ev.label = *label;
    for (const auto& h : history) ev.action_trace.push_back(h.first);
    return ev;
}

struct MinimizerRecord {
    FourierLoop loop;
    ActionValue action;
    double grad_norm = 0.0;
    SolveStatus status = SolveStatus::IterLimit;
    int iterations = 0;
    std::optional<CollisionReport> collision_report;
    std::optional<double> shape_distance_to_ngon;
    std::optional<DivergenceEvidence> divergence;
};

// Seed loop: y_0 interpolates xi_k * amplitude at the checkpoints with the
// lowest admissible sine modes, z_0 = -(amplitude/2) cos t, and a small cosine
// seed in x for the D_N classes.
inline FourierLoop initial_guess(const Problem& p, double amplitude = 1.0) {
    const int n = p.sym.n;
    if (p.sym.kind == SymmetryKind::HN && !hn_compatible(p.xi, n))
        throw InfeasiblePattern("initial_guess: xi incompatible with H_N");
    FourierLoop fl(p.sym, p.order);

    std::vector<int> modes;   // admissible sine modes, lowest first
    std::vector<int> points;  // checkpoint indices carrying independent conditions
    if (p.sym.kind == SymmetryKind::DN) {
        for (int k = 1; k <= n - 1; ++k) modes.push_back(k);
        for (int j = 1; j <= n - 1; ++j) points.push_back(j);
    } else if (n % 2 == 1) {
        for (int k = 2; k <= n - 1; k += 2) modes.push_back(k);
        for (int j = 1; j <= (n - 1) / 2; ++j) points.push_back(j);
    } else {
        for (int k = 1; k <= n - 1; k += 2) modes.push_back(k);
        for (int j = 1; j <= n / 2; ++j) points.push_back(j);
    }
    const int dim = static_cast<int>(modes.size());
    std::vector<std::vector<double>> mat(dim, std::vector<double>(dim));
    std::vector<double> rhs(dim);
    for (int r = 0; r < dim; ++r) {
        for (int cc = 0; cc < dim; ++cc) mat[r][cc] = std::sin(modes[cc] * points[r] * kPi / n);
        rhs[r] = amplitude * p.xi.xi[points[r] - 1];
    }
    const std::vector<double> sol = solve_linear(mat, rhs);
    for (int cc = 0; cc < dim; ++cc) fl.b[modes[cc]] = sol[cc];

    fl.c[1] = -0.5 * amplitude;
    if (p.sym.kind == SymmetryKind::DN) fl.a[1] = 0.1 * amplitude;

    fl = project(fl);
    if (p.fix_x_mean) fl.a[0] = 0.0;
    fl.c[0] = 0.0;
    const auto cls = classify(fl);
    if (!cls || *cls != p.xi)
        throw InfeasiblePattern("initial_guess: interpolant degenerates at a checkpoint");
    return fl;
}

namespace detail {

// Free-coefficient packing: symmetry mask minus mean pins.
struct Packing {
    std::vector<std::pair<int, int>> slots;  // (array 0=a/1=b/2=c, harmonic)

    static Packing build(const Problem& p) {
        Packing pk;
        const CoeffMask m = coefficient_constraints(p.sym, p.order);
        for (int k = 0; k <= p.order; ++k) {
            if (m.a[k] && !(k == 0 && p.fix_x_mean)) pk.slots.push_back({0, k});
            if (m.b[k]) pk.slots.push_back({1, k});
            if (m.c[k] && k != 0) pk.slots.push_back({2, k});  // c_0 pinned by [z_0]=0
        }
        return pk;
    }
    std::vector<double> pack(const FourierLoop& fl) const {
        std::vector<double> x(slots.size());
        for (size_t s = 0; s < slots.size(); ++s) {
            const auto [arr, k] = slots[s];
            x[s] = arr == 0 ? fl.a[k] : arr == 1 ? fl.b[k] : fl.c[k];
        }
        return x;
    }
    std::vector<double> pack(const Gradient& g) const {
        std::vector<double> x(slots.size());
        for (size_t s = 0; s < slots.size(); ++s) {
            const auto [arr, k] = slots[s];
            x[s] = arr == 0 ? g.a[k] : arr == 1 ? g.b[k] : g.c[k];
        }
        return x;
    }
    void unpack(const std::vector<double>& x, FourierLoop& fl) const {
        for (size_t s = 0; s < slots.size(); ++s) {
            const auto [arr, k] = slots[s];
            (arr == 0 ? fl.a[k] : arr == 1 ? fl.b[k] : fl.c[k]) = x[s];
        }
    }
};

inline double vdot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline double vnorm(const std::vector<double>& a) { return std::sqrt(vdot(a, a)); }

struct LbfgsMemory {
    std::deque<std::vector<double>> s, y;
    std::deque<double> rho;
    size_t cap = 10;

    void push(std::vector<double> si, std::vector<double> yi) {
        if (vnorm(si) < 1e-11) return;  // sub-noise steps carry no curvature signal
        const double sy = vdot(si, yi);
        if (sy <= 1e-14 * vnorm(si) * vnorm(yi)) return;  // keep the inverse Hessian positive
        s.push_back(std::move(si));
        y.push_back(std::move(yi));
        rho.push_back(1.0 / sy);
        if (s.size() > cap) {
            s.pop_front();
            y.pop_front();
            rho.pop_front();
        }
    }
    void clear() {
        s.clear();
        y.clear();
        rho.clear();
    }
    std::vector<double> direction(std::vector<double> g) const {
        const int m = static_cast<int>(s.size());
        std::vector<double> alpha(m);
        for (int i = m - 1; i >= 0; --i) {
            alpha[i] = rho[i] * vdot(s[i], g);
            for (size_t d = 0; d < g.size(); ++d) g[d] -= alpha[i] * y[i][d];
        }
        if (m > 0) {
            const double gamma = vdot(s[m - 1], y[m - 1]) / vdot(y[m - 1], y[m - 1]);
            for (double& v : g) v *= gamma;
        }
        for (int i = 0; i < m; ++i) {
            const double beta = rho[i] * vdot(y[i], g);
            for (size_t d = 0; d < g.size(); ++d) g[d] += (alpha[i] - beta) * s[i][d];
        }
        for (double& v : g) v = -v;
        return g;
    }
};

struct EvalResult {
    bool feasible = false;   // collision-free at the grid nodes
    bool in_class = false;   // classify == xi
    double action = std::numeric_limits<double>::infinity();
    double min_distance = 0.0;
    double sup_norm = 0.0;
    ActionValue av;
};

inline EvalResult evaluate(const FourierLoop& fl, const Problem& p) {
    EvalResult r;
    const auto cls = classify(fl);
    r.in_class = cls.has_value() && *cls == p.xi;
    try {
        r.av = action_omega(fl, p.omega, p.grid);
        r.action = r.av.total;
        r.feasible = true;
    } catch (const CollisionSingularity&) {
        return r;
    }
    const SampledLoop sl = synthesize(fl, p.grid);
    r.min_distance = std::numeric_limits<double>::infinity();
    for (int k = 0; k < sl.m; ++k) {
        r.min_distance = std::min(r.min_distance, min_pair_distance(sl.nodes[k]));
        for (int i = 0; i < sl.n; ++i)
            r.sup_norm = std::max(r.sup_norm, norm(sl.nodes[k].body(i)));
    }
    return r;
}

// Escape move for persistent near-collision states: lift the colliding pair
// out of its plane with the smoothstep profile around the collision moment,
// restore the exact symmetry by re-analysis, and keep the result only if the
// action dropped.
inline std::optional<FourierLoop> attempt_deformation_escape(const FourierLoop& fl,
                                                             const Problem& p,
                                                             const CollisionEvent& ev,
                                                             double current_action) {
    const SampledLoop sl = synthesize(fl, p.grid);
    std::vector<Vec3> q0(sl.m), v0(sl.m);
    for (int k = 0; k < sl.m; ++k) {
        q0[k] = sl.nodes[k].body(0);
        v0[k] = sl.vels[k].body(0);
    }
    const double diam = loop_diameter(sl);
    for (double eps : {1e-2, 3e-2, 1e-1}) {
        const double lift = eps * std::max(1.0, diam);
        std::vector<Vec3> qd = q0;
        // lift the generating track near the image of the collision moment
        for (int k = 0; k < sl.m; ++k) {
            double dt = std::abs(sl.time(k) - ev.t);
            dt = std::min(dt, kTwoPi - dt);
            const double f = detail::lift_profile(dt, eps * eps, eps);
            qd[k].z += lift * f;
        }
        SampledLoop cand = expand_choreography(qd, sl.n, &v0);
        FourierLoop flc = analyze(cand, p.sym, p.order);
        if (p.fix_x_mean) flc.a[0] = 0.0;
        flc.c[0] = 0.0;
        const EvalResult r = evaluate(flc, p);
        if (r.feasible && r.in_class && r.action < current_action - 1e-12) return flc;
    }
    return std::nullopt;
}

}  // namespace detail

inline MinimizerRecord minimize(const Problem& prob, const FourierLoop& start) {
    // frequencies outside [0, N] are reduced by full frame turns and, for the
    // negative side, the y-reflection that negates the class
    if (prob.omega < -1e-12 || prob.omega > prob.sym.n + 1e-12) {
        const int n = prob.sym.n;
        const OmegaReduction red = normalize_omega(prob.omega, n);
        Problem reduced = prob;
        reduced.omega = red.omega;
        reduced.xi = reduced_pattern(prob.xi, red);
        reduced.fix_x_mean = Problem::omega_is_boundary(red.omega, n);
        FourierLoop start_red = shift_frame(start, 2 * n * red.turns);
        if (red.conjugated) start_red = conjugate_loop(start_red);
        reduced.order = std::max(reduced.order, start_red.order);
        reduced.grid = std::max(reduced.grid, 2 * n * (reduced.order / n + 1));
        MinimizerRecord rec = minimize(reduced, start_red);
        rec.loop = restore_loop(rec.loop, red, n);
        const int back_grid = std::max(prob.grid, 2 * n * (rec.loop.order / n + 1));
        try {
            rec.action = action_omega(rec.loop, prob.omega, back_grid);
        } catch (const CollisionSingularity&) {
        }
        return rec;
    }

    Problem p = prob;
    if (start.order > p.order) {
        p.order = start.order;
        p.grid = std::max(p.grid, 2 * p.sym.n * (p.order / p.sym.n + 1));
    }
    p.validate();
    const auto start_cls = classify(start);
    if (!start_cls || *start_cls != p.xi)
        throw PreconditionViolated("minimize: start loop is not in the requested class");

    const detail::Packing pk = detail::Packing::build(p);
    FourierLoop base = project(resize_order(start, p.order));
    if (p.fix_x_mean) base.a[0] = 0.0;
    base.c[0] = 0.0;

    auto make_loop = [&](const std::vector<double>& x) {
        FourierLoop fl = base;
        pk.unpack(x, fl);
        return fl;
    };

    std::vector<double> x = pk.pack(base);
    detail::EvalResult cur = detail::evaluate(base, p);
    if (!cur.feasible)
        throw PreconditionViolated("minimize: start loop has grid-node collisions");

    auto grad_at = [&](const FourierLoop& fl) {
        Gradient g = gradient_omega(fl, p.omega, p.grid, p.fix_x_mean, true);
        return pk.pack(g);
    };
    std::vector<double> g = grad_at(base);

    detail::LbfgsMemory mem;
    std::deque<std::pair<double, double>> history;  // (action, sup_norm)
    history.push_back({cur.action, cur.sup_norm});
    const bool divergence_eligible = divergence_label(p).has_value();

    MinimizerRecord rec;
    rec.status = SolveStatus::IterLimit;
    int near_collision_streak = 0;
    bool escape_tried = false;

    int it = 0;
    for (; it < p.tol.max_iters; ++it) {
        const double gnorm = detail::vnorm(g);
        if (gnorm <= p.tol.grad_tol) {
            rec.status = SolveStatus::Converged;
            break;
        }

        // divergence protocol: expanding the loop is always class-preserving,
        // so offer a doubling step before the quasi-Newton move
        if (divergence_eligible) {
            std::vector<double> xs(x.size());
            for (size_t d = 0; d < x.size(); ++d) xs[d] = 2.0 * x[d];
            const FourierLoop cand = make_loop(xs);
            const detail::EvalResult r = detail::evaluate(cand, p);
            if (r.feasible && r.in_class && r.action < cur.action) {
                x = xs;
                cur = r;
                g = grad_at(cand);
                mem.clear();
                history.push_back({cur.action, cur.sup_norm});
                if (auto ev = divergence_detector(history, synthesize(cand, p.grid), p)) {
                    rec.status = SolveStatus::Diverging;
                    rec.divergence = ev;
                    rec.shape_distance_to_ngon = ev->shape_distance;
                    break;
                }
                continue;
            }
        }

        std::vector<double> dir = mem.direction(g);
        if (detail::vdot(dir, g) > -1e-14 * detail::vnorm(dir) * gnorm) {
            for (size_t d = 0; d < dir.size(); ++d) dir[d] = -g[d];
        }
        if (mem.s.empty()) {
            const double sc = 1.0 / std::max(1.0, gnorm);
            for (double& v : dir) v *= sc;
        }

        double alpha = 1.0;
        bool accepted = false;
        detail::EvalResult nxt;
        std::vector<double> xn(x.size());
        const double slope = detail::vdot(g, dir);
        // sufficient decrease up to the floating-point noise of the action value
        const double noise = 4e-15 * std::max(1.0, std::abs(cur.action));
        for (int ls = 0; ls < 60; ++ls) {
            for (size_t d = 0; d < x.size(); ++d) xn[d] = x[d] + alpha * dir[d];
            const FourierLoop cand = make_loop(xn);
            const detail::EvalResult r = detail::evaluate(cand, p);
            // reject sign-flipping or colliding candidates and halve
            if (r.feasible && r.in_class &&
                r.action <= cur.action + 1e-4 * alpha * slope + noise) {
                nxt = r;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            rec.status = SolveStatus::IterLimit;
            break;
        }

        double step = 0.0;
        std::vector<double> s(x.size());
        for (size_t d = 0; d < x.size(); ++d) {
            s[d] = xn[d] - x[d];
            step = std::max(step, std::abs(s[d]));
        }
        const FourierLoop newloop = make_loop(xn);
        std::vector<double> gn = grad_at(newloop);
        std::vector<double> ydiff(x.size());
        for (size_t d = 0; d < x.size(); ++d) ydiff[d] = gn[d] - g[d];
        mem.push(std::move(s), std::move(ydiff));
        x = xn;
        cur = nxt;
        g = std::move(gn);
        history.push_back({cur.action, cur.sup_norm});
        if (history.size() > 4096) history.pop_front();

        if (divergence_eligible) {
            if (auto ev = divergence_detector(history, synthesize(newloop, p.grid), p)) {
                rec.status = SolveStatus::Diverging;
                rec.divergence = ev;
                rec.shape_distance_to_ngon = ev->shape_distance;
                break;
            }
        }

        // persistent near-collision handling
        if (cur.min_distance < p.tol.collision_dist) {
            if (++near_collision_streak >= 50) {
                const SampledLoop sl = synthesize(make_loop(x), p.grid);
                const CollisionReport rep = collision_monitor(sl, p.tol.collision_dist);
                if (!escape_tried && !rep.events.empty()) {
                    escape_tried = true;
                    if (auto esc = detail::attempt_deformation_escape(make_loop(x), p,
                                                                      rep.events.front(),
                                                                      cur.action)) {
                        base = *esc;
                        x = pk.pack(base);
                        cur = detail::evaluate(base, p);
                        g = grad_at(base);
                        mem.clear();
                        near_collision_streak = 0;
                        continue;
                    }
                }
                rec.status = SolveStatus::CollisionCandidate;
                rec.collision_report = rep;
                break;
            }
        } else {
            near_collision_streak = 0;
        }

        if (step < p.tol.step_tol && detail::vnorm(g) > p.tol.grad_tol) {
            rec.status = SolveStatus::IterLimit;
            break;
        }
    }

    const FourierLoop fin = make_loop(x);
    rec.loop = fin;
    rec.iterations = it;
    rec.grad_norm = detail::vnorm(g);
    try {
        rec.action = action_omega(fin, p.omega, p.grid);
    } catch (const CollisionSingularity&) {
        rec.action = ActionValue{cur.action, 0.0, 0.0, p.omega};
    }
    if (!rec.collision_report) {
        const SampledLoop sl = synthesize(fin, p.grid);
        const CollisionReport rep = collision_monitor(sl, p.tol.collision_dist);
        if (!rep.empty()) rec.collision_report = rep;
        if (!rec.shape_distance_to_ngon)
            if (auto label = divergence_label(p))
                rec.shape_distance_to_ngon = ngon_shape_distance(sl, *label);
    }
    if (rec.status == SolveStatus::Converged) {
        const auto cls = classify(fin);
        if (!cls || *cls != p.xi) rec.status = SolveStatus::CollisionCandidate;
    }
    return rec;
}

}  // namespace chorea
