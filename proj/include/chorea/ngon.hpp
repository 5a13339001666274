#pragma once

#include "chorea/topology.hpp"

// Regular N-gon central configurations and the single-harmonic loops through
// them. The size R_N is fixed so that e^{Jt} applied to the N-gon solves the
// equations of motion: R_N^3 = (1/4) sum_{j=1}^{N-1} csc(j pi / N).

namespace chorea {

// Winding label of an N-gon configuration: m_{i+1} sits k vertices clockwise
// from m_i, with m_0 on the positive (+) or negative (-) x-axis.
struct NGonLabel {
    int k = 1;
    int sign = +1;  // +1: m_0 on the positive x-axis, -1: negative

    void validate(int n) const {
        if (k < 1 || k > n - 1) throw ConfigError("NGonLabel: k out of range [1, N-1]");
        if (gcd_ll(k, n) != 1) throw ConfigError("NGonLabel: gcd(k, N) must be 1");
        if (sign != 1 && sign != -1) throw ConfigError("NGonLabel: sign must be +-1");
    }
};

inline double ngon_radius(int n) {
    double s = 0.0;
    for (int j = 1; j <= n - 1; ++j) s += 1.0 / std::sin(j * kPi / n);
    return std::cbrt(0.25 * s);
}

// Vertex positions q_i = sign * R_N * e^{-J 2 pi k i / N}, z = 0.
inline Configuration build_ngon(const NGonLabel& label, int n) {
    label.validate(n);
    Configuration c(n);
    const double r = ngon_radius(n);
    for (int i = 0; i < n; ++i) {
        const double ang = -kTwoPi * label.k * i / n;
        c.zeta[i] = double(label.sign) * r * std::exp(Cplx{0.0, ang});
        c.z[i] = 0.0;
    }
    return c;
}

// The loop scale * e^{-J k t} * Ngon as a Fourier loop (single harmonic k):
// x_0 = s*scale*R cos(kt), y_0 = -s*scale*R sin(kt).
inline FourierLoop ngon_loop(const NGonLabel& label, int n, double scale = 1.0, int order = -1) {
    label.validate(n);
    if (order < label.k) order = label.k;
    FourierLoop fl(SymmetryClass(n, SymmetryKind::DN), order);
    const double amp = label.sign * scale * ngon_radius(n);
    fl.a[label.k] = amp;
    fl.b[label.k] = -amp;
    return fl;
}

// Topological class of the N-gon loop, computed by construction + classify
// (synthesis is exact trigonometric evaluation, so a coarse grid suffices).
inline SignPattern ngon_pattern(const NGonLabel& label, int n) {
    const FourierLoop fl = ngon_loop(label, n);
    const SampledLoop sl = synthesize(fl, 4 * n);
    const auto p = classify(sl);
    if (!p) throw DegenerateLoop("ngon_pattern: checkpoint degenerate (gcd(k,N) != 1?)");
    return *p;
}

}  // namespace chorea
