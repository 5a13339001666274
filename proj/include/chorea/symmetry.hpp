#pragma once

#include <utility>
#include <vector>

#include "chorea/common.hpp"

// D_N and H_N = D_N x Z_2 actions on 2pi-periodic N-body loops, the induced
// linear constraints on the generating body's Fourier coefficients, and the
// fundamental-domain boundary relations.

namespace chorea {

enum class SymmetryKind { DN, HN };

struct SymmetryClass {
    int n = 0;
    SymmetryKind kind = SymmetryKind::DN;

    SymmetryClass() = default;
    SymmetryClass(int n_, SymmetryKind kind_) : n(n_), kind(kind_) {
        if (n < 2) throw ConfigError("SymmetryClass: need n >= 2");
    }

    // The z-axis is a rotation axis for D_N always, for H_N only when N is odd,
    // so rotating frames (omega != 0) are admissible exactly in those cases.
    bool rotating_allowed() const { return kind == SymmetryKind::DN || (n % 2 == 1); }
};

// One group element acting on loops:
//   (e.q)_i(t) = space_map * q_{index_map^{-1}(i)}(time_sign * t - time_sign * time_offset)
// time map tau(e): t -> time_sign * t + time_offset.
struct GroupElementAction {
    int time_sign = 1;        // +1 or -1
    double time_offset = 0.0; // multiple of pi/N for the groups used here
    Mat3 space_map = Mat3::identity();
    std::vector<int> index_map; // sigma(e), a bijection of {0..N-1}

    std::vector<int> inverse_index_map() const {
        std::vector<int> inv(index_map.size());
        for (size_t i = 0; i < index_map.size(); ++i) inv[index_map[i]] = static_cast<int>(i);
        return inv;
    }
};

// Generator g of D_N: tau(g) t = t - 2pi/N, rho(g) = Id, sigma(g) = (0,1,...,N-1).
inline GroupElementAction dn_generator_g(int n) {
    GroupElementAction e;
    e.time_sign = 1;
    e.time_offset = -kTwoPi / n;
    e.space_map = Mat3::identity();
    e.index_map.resize(n);
    for (int i = 0; i < n; ++i) e.index_map[i] = (i + 1) % n;
    return e;
}

// Generator h of D_N: tau(h) t = 2pi/N - t, rho(h) = reflect_xz,
// sigma(h) = prod_{i=0}^{[(N-1)/2]} (i, N-1-i).
inline GroupElementAction dn_generator_h(int n) {
    GroupElementAction e;
    e.time_sign = -1;
    e.time_offset = kTwoPi / n;
    e.space_map = Mat3::reflect_xz();
    e.index_map.resize(n);
    for (int i = 0; i < n; ++i) e.index_map[i] = i;
    for (int i = 0; i <= (n - 1) / 2; ++i) std::swap(e.index_map[i], e.index_map[n - 1 - i]);
    return e;
}

// Extra generator f of H_N.
inline GroupElementAction hn_generator_f(int n) {
    GroupElementAction e;
    e.space_map = Mat3::rotate_pi_x();
    e.index_map.resize(n);
    for (int i = 0; i < n; ++i) e.index_map[i] = i;
    if (n % 2 == 0) {
        // tau(f) t = t, sigma(f) = prod_{i=0}^{n/2-1} (i, n/2+i)
        e.time_sign = 1;
        e.time_offset = 0.0;
        const int half = n / 2;
        for (int i = 0; i < half; ++i) std::swap(e.index_map[i], e.index_map[half + i]);
    } else {
        // tau(f) t = pi/N - t,
        // sigma(f) = (prod_{i=0}^{[m/2]} (i, m-i)) (prod_{i=0}^{[(m-1)/2]} (m+1+i, 2m-i)), m=(N-1)/2
        e.time_sign = -1;
        e.time_offset = kPi / n;
        const int m = (n - 1) / 2;
        for (int i = 0; i <= m / 2; ++i) std::swap(e.index_map[i], e.index_map[m - i]);
        for (int i = 0; i <= (m - 1) / 2; ++i)
            std::swap(e.index_map[m + 1 + i], e.index_map[2 * m - i]);
    }
    return e;
}

inline std::vector<GroupElementAction> symmetry_generators(const SymmetryClass& sym) {
    std::vector<GroupElementAction> gens{dn_generator_g(sym.n), dn_generator_h(sym.n)};
    if (sym.kind == SymmetryKind::HN) gens.push_back(hn_generator_f(sym.n));
    return gens;
}

// Admissible Fourier coefficients of q_0 under the symmetry class. With the
// D_N structure x_0, z_0 are cosine series and y_0 a sine series; H_N pins
// additional parities. Entry 1 = free, 0 = forced zero.
struct CoeffMask {
    std::vector<char> a, b, c; // size order+1 each; b[0] is always 0

    int order() const { return static_cast<int>(a.size()) - 1; }
};

inline CoeffMask coefficient_constraints(const SymmetryClass& sym, int order) {
    if (order < 1) throw ConfigError("coefficient_constraints: order must be >= 1");
    CoeffMask m;
    m.a.assign(order + 1, 1);
    m.b.assign(order + 1, 1);
    m.c.assign(order + 1, 1);
    m.b[0] = 0;
    if (sym.kind == SymmetryKind::HN) {
        if (sym.n % 2 == 1) {
            // q_0(pi - t) = R_x q_0(t): x even harmonics, y even harmonics,
            // z odd harmonics.
            for (int k = 0; k <= order; ++k) {
                if (k % 2 == 1) { m.a[k] = 0; m.b[k] = 0; }
                if (k % 2 == 0) m.c[k] = 0;
            }
        } else {
            // q_0(t + pi) = R_x q_0(t): x even harmonics, y and z odd harmonics.
            for (int k = 0; k <= order; ++k) {
                if (k % 2 == 1) m.a[k] = 0;
                if (k % 2 == 0) { m.b[k] = 0; m.c[k] = 0; }
            }
        }
    }
    return m;
}

// One linear boundary relation q_lhs(lhs_t) = map * q_rhs(rhs_t),
// with both moments in {0, pi/N}.
struct BoundaryRelation {
    int lhs = 0;
    double lhs_t = 0.0;
    int rhs = 0;
    double rhs_t = 0.0;
    Mat3 map = Mat3::identity();
};

// The fundamental-domain boundary structure of D_N-equivariant loops: the
// reflection pairs bodies i and N-i (mod N) at t = 0 and bodies i and N-1-i
// at t = pi/N, with self-paired bodies pinned to the xz-plane. For H_N the
// relations induced by the extra generator are appended.
inline std::vector<BoundaryRelation> boundary_conditions(const SymmetryClass& sym) {
    const int n = sym.n;
    const double tb = kPi / n;
    const Mat3 rxz = Mat3::reflect_xz();
    std::vector<BoundaryRelation> rel;
    for (int i = 1; i <= (n - 1) / 2; ++i) rel.push_back({i, 0.0, n - i, 0.0, rxz});
    for (int i = 0; i < n - 1 - i; ++i) rel.push_back({i, tb, n - 1 - i, tb, rxz});
    rel.push_back({0, 0.0, 0, 0.0, rxz});
    if (n % 2 == 1)
        rel.push_back({(n - 1) / 2, tb, (n - 1) / 2, tb, rxz});
    else
        rel.push_back({n / 2, 0.0, n / 2, 0.0, rxz});
    if (sym.kind == SymmetryKind::HN) {
        const Mat3 rx = Mat3::rotate_pi_x();
        if (n % 2 == 1) {
            // q_0(pi - t) = R_x q_0(t), written through the choreography shifts:
            const int m = (n - 1) / 2;
            rel.push_back({m, tb, 0, 0.0, rx});
            rel.push_back({m, 0.0, 0, tb, rx});
        } else {
            // q_0(t + pi) = R_x q_0(t):
            const int half = n / 2;
            rel.push_back({half, 0.0, 0, 0.0, rx});
            rel.push_back({half, tb, 0, tb, rx});
        }
    }
    return rel;
}

}  // namespace chorea
