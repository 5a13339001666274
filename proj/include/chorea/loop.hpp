#pragma once

#include <optional>
#include <vector>

#include "chorea/nbody.hpp"
#include "chorea/symmetry.hpp"

// Fourier representation of the generating body's path, synthesis to sampled
// N-body loops, trigonometric analysis, and the rotating-frame kinetic norm
// evaluated exactly in coefficient space.

namespace chorea {

// Truncated Fourier series of q_0 compatible with the D_N structure:
//   x_0(t) = sum_k a[k] cos(kt), y_0(t) = sum_k b[k] sin(kt),
//   z_0(t) = sum_k c[k] cos(kt),  k = 0..order (b[0] unused, kept 0).
struct FourierLoop {
    SymmetryClass sym;
    int order = 0;
    std::vector<double> a, b, c;

    FourierLoop() = default;
    FourierLoop(const SymmetryClass& sym_, int order_)
        : sym(sym_), order(order_), a(order_ + 1, 0.0), b(order_ + 1, 0.0), c(order_ + 1, 0.0) {}

    Vec3 eval(double t) const {
        double x = a[0], y = 0.0, z = c[0];
        for (int k = 1; k <= order; ++k) {
            const double ck = std::cos(k * t), sk = std::sin(k * t);
            x += a[k] * ck;
            y += b[k] * sk;
            z += c[k] * ck;
        }
        return {x, y, z};
    }
    Vec3 eval_velocity(double t) const {
        double x = 0.0, y = 0.0, z = 0.0;
        for (int k = 1; k <= order; ++k) {
            const double ck = std::cos(k * t), sk = std::sin(k * t);
            x += -k * a[k] * sk;
            y += k * b[k] * ck;
            z += -k * c[k] * sk;
        }
        return {x, y, z};
    }
    Vec3 eval_accel(double t) const {
        double x = 0.0, y = 0.0, z = 0.0;
        for (int k = 1; k <= order; ++k) {
            const double k2 = double(k) * k;
            const double ck = std::cos(k * t), sk = std::sin(k * t);
            x += -k2 * a[k] * ck;
            y += -k2 * b[k] * sk;
            z += -k2 * c[k] * ck;
        }
        return {x, y, z};
    }

    double y_checkpoint(int i) const {  // y_0(i pi / N)
        double y = 0.0;
        const double t = i * kPi / sym.n;
        for (int k = 1; k <= order; ++k) y += b[k] * std::sin(k * t);
        return y;
    }
};

inline FourierLoop resize_order(const FourierLoop& fl, int order) {
    FourierLoop out(fl.sym, order);
    for (int k = 0; k <= std::min(order, fl.order); ++k) {
        out.a[k] = fl.a[k];
        out.b[k] = fl.b[k];
        out.c[k] = fl.c[k];
    }
    return out;
}

// Orthogonal projection onto the admissible coefficient subspace.
inline FourierLoop project(FourierLoop fl) {
    const CoeffMask m = coefficient_constraints(fl.sym, fl.order);
    for (int k = 0; k <= fl.order; ++k) {
        if (!m.a[k]) fl.a[k] = 0.0;
        if (!m.b[k]) fl.b[k] = 0.0;
        if (!m.c[k]) fl.c[k] = 0.0;
    }
    return fl;
}

// A 2pi-periodic N-body loop sampled on M uniform nodes, M a multiple of 2N so
// that every checkpoint k pi/N and every symmetry time map lands on a node.
struct SampledLoop {
    int n = 0;
    int m = 0;
    std::vector<Configuration> nodes;
    std::vector<Velocity> vels;  // optional; same length as nodes when present

    bool has_velocities() const { return !vels.empty(); }
    double time(int k) const { return kTwoPi * k / m; }
};

inline void require_grid(int m, int n) {
    if (m <= 0 || m % (2 * n) != 0)
        throw GridNotDivisible("grid size " + std::to_string(m) + " is not a positive multiple of 2N");
}

// q_i(t) = q_0(t + 2 pi i / N), exact on grid nodes.
inline SampledLoop expand_choreography(const std::vector<Vec3>& q0, int n,
                                       const std::vector<Vec3>* v0 = nullptr) {
    const int m = static_cast<int>(q0.size());
    if (m <= 0 || m % n != 0)
        throw GridNotDivisible("expand_choreography: grid not divisible by N");
    SampledLoop sl;
    sl.n = n;
    sl.m = m;
    sl.nodes.assign(m, Configuration(n));
    if (v0) sl.vels.assign(m, Velocity(n));
    const int stride = m / n;
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < n; ++i) {
            sl.nodes[k].set_body(i, q0[(k + i * stride) % m]);
            if (v0) sl.vels[k].set_body(i, (*v0)[(k + i * stride) % m]);
        }
    return sl;
}

// Exact trigonometric evaluation at the nodes, expanded to all bodies.
inline SampledLoop synthesize(const FourierLoop& fl, int m) {
    require_grid(m, fl.sym.n);
    std::vector<Vec3> q0(m), v0(m);
    for (int k = 0; k < m; ++k) {
        const double t = kTwoPi * k / m;
        q0[k] = fl.eval(t);
        v0[k] = fl.eval_velocity(t);
    }
    return expand_choreography(q0, fl.sym.n, &v0);
}

// Trigonometric interpolation coefficients of the body-0 track, projected onto
// the symmetry subspace. Requires M > 2F.
inline FourierLoop analyze(const SampledLoop& sl, const SymmetryClass& sym, int order) {
    if (sl.m <= 2 * order)
        throw PreconditionViolated("analyze: need M > 2F for trigonometric interpolation");
    FourierLoop fl(sym, order);
    const int m = sl.m;
    for (int k = 0; k <= order; ++k) {
        double ax = 0.0, by = 0.0, cz = 0.0;
        for (int j = 0; j < m; ++j) {
            const double t = kTwoPi * j / m;
            const Vec3 p = sl.nodes[j].body(0);
            ax += p.x * std::cos(k * t);
            by += p.y * std::sin(k * t);
            cz += p.z * std::cos(k * t);
        }
        const double w = (k == 0) ? 1.0 / m : 2.0 / m;
        fl.a[k] = w * ax;
        fl.b[k] = (k == 0) ? 0.0 : w * by;
        fl.c[k] = w * cz;
    }
    return project(fl);
}

// integral over [0,2pi] of sum_i (|d(zeta_i) + J omega zeta_i|^2 + |d(z_i)|^2),
// computed exactly from the choreography structure:
//   N * 2pi * [ omega^2 a0^2
//             + sum_k ((omega+k)^2 (a_k+b_k)^2 + (omega-k)^2 (a_k-b_k)^2)/4
//             + sum_k k^2 c_k^2 / 2 ].
inline double kinetic_norm_omega(const FourierLoop& fl, double omega) {
    double s = omega * omega * fl.a[0] * fl.a[0];
    for (int k = 1; k <= fl.order; ++k) {
        const double p = fl.a[k] + fl.b[k];
        const double q = fl.a[k] - fl.b[k];
        s += ((omega + k) * (omega + k) * p * p + (omega - k) * (omega - k) * q * q) / 4.0;
        s += 0.5 * k * k * fl.c[k] * fl.c[k];
    }
    return fl.sym.n * kTwoPi * s;
}

// Group action on a sampled loop: (e.q)_i(t) = rho(e) q_{sigma(e)^{-1}(i)}(tau(e)^{-1} t).
inline SampledLoop act(const GroupElementAction& e, const SampledLoop& sl) {
    const int m = sl.m;
    // tau(e)^{-1} t = s*(t - offset) for tau(e) t = s*t + offset
    const double off_nodes_d = e.time_offset * m / kTwoPi;
    const double rounded = std::round(off_nodes_d);
    if (std::abs(off_nodes_d - rounded) > 1e-9)
        throw GridNotClosed("act: time map does not permute grid nodes");
    const int off_nodes = static_cast<int>(rounded);
    const std::vector<int> inv = e.inverse_index_map();
    SampledLoop out;
    out.n = sl.n;
    out.m = m;
    out.nodes.assign(m, Configuration(sl.n));
    if (sl.has_velocities()) out.vels.assign(m, Velocity(sl.n));
    for (int k = 0; k < m; ++k) {
        int src = (e.time_sign > 0) ? (k - off_nodes) : (off_nodes - k);
        src = ((src % m) + m) % m;
        for (int i = 0; i < sl.n; ++i) {
            const Vec3 p = sl.nodes[src].body(inv[i]);
            out.nodes[k].set_body(i, e.space_map * p);
            if (sl.has_velocities()) {
                const Vec3 v = sl.vels[src].body(inv[i]);
                out.vels[k].set_body(i, double(e.time_sign) * (e.space_map * v));
            }
        }
    }
    return out;
}

inline double loop_max_difference(const SampledLoop& a, const SampledLoop& b) {
    double d = 0.0;
    for (int k = 0; k < a.m; ++k)
        for (int i = 0; i < a.n; ++i) d = std::max(d, norm(a.nodes[k].body(i) - b.nodes[k].body(i)));
    return d;
}

// Diameter of the sampled generating curve (all bodies trace the same curve).
inline double loop_diameter(const SampledLoop& sl) {
    double d = 0.0;
    for (int k = 0; k < sl.m; ++k) {
        const Vec3 p = sl.nodes[k].body(0);
        for (int j = k + 1; j < sl.m; ++j) d = std::max(d, norm(p - sl.nodes[j].body(0)));
    }
    return d;
}

inline double boundary_violation(const SampledLoop& sl, const std::vector<BoundaryRelation>& rels) {
    double worst = 0.0;
    for (const auto& r : rels) {
        const double li = r.lhs_t * sl.m / kTwoPi;
        const double ri = r.rhs_t * sl.m / kTwoPi;
        const int lk = static_cast<int>(std::llround(li)) % sl.m;
        const int rk = static_cast<int>(std::llround(ri)) % sl.m;
        if (std::abs(li - lk) > 1e-9 || std::abs(ri - rk) > 1e-9)
            throw GridNotClosed("boundary_violation: boundary moment off-grid");
        const Vec3 lhs = sl.nodes[lk].body(r.lhs);
        const Vec3 rhs = r.map * sl.nodes[rk].body(r.rhs);
        worst = std::max(worst, norm(lhs - rhs));
    }
    return worst;
}

// Per-node velocities via full-order trigonometric interpolation of each
// coordinate track. O(M^2) per body; grids here are small.
inline std::vector<double> spectral_derivative(const std::vector<double>& f) {
    const int m = static_cast<int>(f.size());
    const int kmax = m / 2;
    std::vector<double> A(kmax + 1, 0.0), B(kmax + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
        double ak = 0.0, bk = 0.0;
        for (int j = 0; j < m; ++j) {
            const double t = kTwoPi * j / m;
            ak += f[j] * std::cos(k * t);
            bk += f[j] * std::sin(k * t);
        }
        const double w = (k == 0 || 2 * k == m) ? 1.0 / m : 2.0 / m;
        A[k] = w * ak;
        B[k] = w * bk;
    }
    std::vector<double> df(m, 0.0);
    for (int j = 0; j < m; ++j) {
        const double t = kTwoPi * j / m;
        double s = 0.0;
        // the Nyquist cosine mode has no well-defined grid derivative; drop it
        for (int k = 1; k <= kmax && 2 * k != m; ++k)
            s += k * (-A[k] * std::sin(k * t) + B[k] * std::cos(k * t));
        df[j] = s;
    }
    return df;
}

inline void fill_velocities_spectral(SampledLoop& sl) {
    sl.vels.assign(sl.m, Velocity(sl.n));
    std::vector<double> tr(sl.m);
    for (int i = 0; i < sl.n; ++i) {
        for (int comp = 0; comp < 3; ++comp) {
            for (int k = 0; k < sl.m; ++k) {
                const Vec3 p = sl.nodes[k].body(i);
                tr[k] = comp == 0 ? p.x : (comp == 1 ? p.y : p.z);
            }
            const std::vector<double> d = spectral_derivative(tr);
            for (int k = 0; k < sl.m; ++k) {
                Vec3 v = sl.vels[k].body(i);
                (comp == 0 ? v.x : comp == 1 ? v.y : v.z) = d[k];
                sl.vels[k].set_body(i, v);
            }
        }
    }
}

// Quadrature action over the sampled loop: trapezoid (= uniform sum on a
// periodic grid) of K_omega + U using stored velocities.
inline double sampled_action_omega(const SampledLoop& sl, double omega,
                                   double floor = kDistanceFloor) {
    if (!sl.has_velocities())
        throw PreconditionViolated("sampled_action_omega: loop has no velocities");
    const Cplx J{0.0, 1.0};
    double s = 0.0;
    for (int k = 0; k < sl.m; ++k) {
        double kin = 0.0;
        for (int i = 0; i < sl.n; ++i) {
            kin += std::norm(sl.vels[k].dzeta[i] + J * omega * sl.nodes[k].zeta[i]);
            kin += sl.vels[k].dz[i] * sl.vels[k].dz[i];
        }
        double u;
        try {
            u = potential(sl.nodes[k], floor);
        } catch (const CollisionSingularity& e) {
            throw CollisionSingularity(std::string(e.what()) + " at node " + std::to_string(k), k,
                                       e.body_i, e.body_j);
        }
        s += 0.5 * kin + u;
    }
    return s * kTwoPi / sl.m;
}

// zeta_i -> e^{J omega t} zeta_i per node; velocities transform by the product
// rule. For integer omega the result is again 2pi-periodic.
inline SampledLoop loop_to_inertial(const SampledLoop& sl, double omega) {
    SampledLoop out = sl;
    const Cplx J{0.0, 1.0};
    for (int k = 0; k < sl.m; ++k) {
        const Cplx phase = std::exp(J * (omega * sl.time(k)));
        for (int i = 0; i < sl.n; ++i) {
            out.nodes[k].zeta[i] = phase * sl.nodes[k].zeta[i];
            if (sl.has_velocities())
                out.vels[k].dzeta[i] =
                    phase * (sl.vels[k].dzeta[i] + J * omega * sl.nodes[k].zeta[i]);
        }
    }
    return out;
}

// Multiply the horizontal part by e^{J p t} in coefficient space: complex
// modes shift by p and the result stays within the cosine/sine structure.
// p must be a multiple of N, otherwise the choreography expansion of the
// result would describe a different transformation of the non-generating
// bodies. Used by the omega reduction (p = 2mN) and the omega = N duality.
inline FourierLoop shift_frame(const FourierLoop& fl, int p) {
    if (p % fl.sym.n != 0)
        throw PreconditionViolated("shift_frame: p must be a multiple of N");
    const int order2 = fl.order + std::abs(p);
    FourierLoop out(fl.sym, order2);
    std::vector<double> mode(2 * order2 + 1, 0.0);  // index k + order2, real coefficients
    auto midx = [order2](int k) { return k + order2; };
    mode[midx(0)] = fl.a[0];
    for (int k = 1; k <= fl.order; ++k) {
        mode[midx(k)] += 0.5 * (fl.a[k] + fl.b[k]);
        mode[midx(-k)] += 0.5 * (fl.a[k] - fl.b[k]);
    }
    std::vector<double> shifted(2 * order2 + 1, 0.0);
    for (int k = -fl.order; k <= fl.order; ++k) {
        const int k2 = k + p;
        if (std::abs(k2) <= order2) shifted[midx(k2)] += mode[midx(k)];
    }
    out.a[0] = shifted[midx(0)];
    for (int k = 1; k <= order2; ++k) {
        out.a[k] = shifted[midx(k)] + shifted[midx(-k)];
        out.b[k] = shifted[midx(k)] - shifted[midx(-k)];
    }
    for (int k = 0; k <= fl.order; ++k) out.c[k] = fl.c[k];
    return out;
}

// y_0 -> -y_0 (conjugation of the horizontal part), mapping omega to -omega.
inline FourierLoop conjugate_loop(const FourierLoop& fl) {
    FourierLoop out = fl;
    for (int k = 1; k <= fl.order; ++k) out.b[k] = -out.b[k];
    return out;
}

}  // namespace chorea
