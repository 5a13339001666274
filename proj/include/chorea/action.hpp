#pragma once

#include <vector>

#include "chorea/loop.hpp"

// A_omega over the full period: the kinetic quadratic form is evaluated
// exactly in coefficient space, the potential integral by the periodic
// trapezoid rule over the grid nodes. The gradient combines the exact kinetic
// derivative with the adjoint transform of the per-node forces.

namespace chorea {

struct ActionValue {
    double total = 0.0;
    double kinetic = 0.0;            // kinetic_norm_omega (unhalved quadratic form)
    double potential_integral = 0.0;
    double omega = 0.0;
};

// Same coefficient layout as FourierLoop.
struct Gradient {
    std::vector<double> a, b, c;

    explicit Gradient(int order = 0) : a(order + 1, 0.0), b(order + 1, 0.0), c(order + 1, 0.0) {}
    int order() const { return static_cast<int>(a.size()) - 1; }

    double norm() const {
        double s = 0.0;
        for (double v : a) s += v * v;
        for (double v : b) s += v * v;
        for (double v : c) s += v * v;
        return std::sqrt(s);
    }
};

inline ActionValue action_omega(const FourierLoop& fl, double omega, int m,
                                double floor = kDistanceFloor) {
    require_grid(m, fl.sym.n);
    if (m <= 2 * fl.order) throw PreconditionViolated("action_omega: need M > 2F");
    ActionValue av;
    av.omega = omega;
    av.kinetic = kinetic_norm_omega(fl, omega);
    const SampledLoop sl = synthesize(fl, m);
    double u = 0.0;
    for (int k = 0; k < m; ++k) {
        try {
            u += potential(sl.nodes[k], floor);
        } catch (const CollisionSingularity& e) {
            throw CollisionSingularity(std::string(e.what()) + " at node " + std::to_string(k), k,
                                       e.body_i, e.body_j);
        }
    }
    av.potential_integral = u * kTwoPi / m;
    av.total = 0.5 * av.kinetic + av.potential_integral;
    return av;
}

// Derivative of (1/2) kinetic_norm_omega with respect to the coefficients.
inline Gradient kinetic_gradient(const FourierLoop& fl, double omega) {
    Gradient g(fl.order);
    const double w = fl.sym.n * kTwoPi;
    g.a[0] = w * omega * omega * fl.a[0];
    for (int k = 1; k <= fl.order; ++k) {
        const double p = fl.a[k] + fl.b[k];
        const double q = fl.a[k] - fl.b[k];
        const double cp = (omega + k) * (omega + k);
        const double cq = (omega - k) * (omega - k);
        g.a[k] = w * 0.25 * (cp * p + cq * q);
        g.b[k] = w * 0.25 * (cp * p - cq * q);
        g.c[k] = w * 0.5 * k * k * fl.c[k];
    }
    return g;
}

// Derivative of the trapezoid potential integral: per-node forces aggregated
// over the choreography shifts, then transformed to coefficient space.
inline Gradient potential_gradient(const FourierLoop& fl, int m, double floor = kDistanceFloor) {
    require_grid(m, fl.sym.n);
    const int n = fl.sym.n;
    const SampledLoop sl = synthesize(fl, m);
    const int stride = m / n;
    std::vector<Vec3> agg(m, Vec3{});
    for (int k = 0; k < m; ++k) {
        std::vector<Vec3> f;
        try {
            f = force(sl.nodes[k], floor);
        } catch (const CollisionSingularity& e) {
            throw CollisionSingularity(std::string(e.what()) + " at node " + std::to_string(k), k,
                                       e.body_i, e.body_j);
        }
        for (int i = 0; i < n; ++i) agg[(k + i * stride) % m] += f[i];
    }
    Gradient g(fl.order);
    const double w = kTwoPi / m;
    for (int k = 0; k <= fl.order; ++k) {
        double ga = 0.0, gb = 0.0, gc = 0.0;
        for (int s = 0; s < m; ++s) {
            const double t = kTwoPi * s / m;
            const double ck = std::cos(k * t), sk = std::sin(k * t);
            ga += agg[s].x * ck;
            gb += agg[s].y * sk;
            gc += agg[s].z * ck;
        }
        g.a[k] = w * ga;
        g.b[k] = (k == 0) ? 0.0 : w * gb;
        g.c[k] = w * gc;
    }
    return g;
}

// Project a gradient onto the admissible subspace; mean-pinned coefficients
// receive zero gradient.
inline void project_gradient(Gradient& g, const SymmetryClass& sym, bool pin_a0, bool pin_c0) {
    const CoeffMask mask = coefficient_constraints(sym, g.order());
    for (int k = 0; k <= g.order(); ++k) {
        if (!mask.a[k]) g.a[k] = 0.0;
        if (!mask.b[k]) g.b[k] = 0.0;
        if (!mask.c[k]) g.c[k] = 0.0;
    }
    if (pin_a0) g.a[0] = 0.0;
    if (pin_c0) g.c[0] = 0.0;
}

inline Gradient gradient_omega(const FourierLoop& fl, double omega, int m, bool pin_a0 = false,
                               bool pin_c0 = true, double floor = kDistanceFloor) {
    Gradient g = kinetic_gradient(fl, omega);
    const Gradient p = potential_gradient(fl, m, floor);
    for (int k = 0; k <= fl.order; ++k) {
        g.a[k] += p.a[k];
        g.b[k] += p.b[k];
        g.c[k] += p.c[k];
    }
    project_gradient(g, fl.sym, pin_a0, pin_c0);
    return g;
}

}  // namespace chorea
