#pragma once

#include <vector>

#include "chorea/loop.hpp"

// The monotone rearrangement: the vertical coordinate of each body over the
// fundamental domain [0, pi/N] is replaced by a cumulative absolute-increment
// path with constants matching the boundary structure. Pairwise vertical
// spreads never shrink and per-body kinetic content is preserved, so the
// action never increases.

namespace chorea {

// sigma with sigma^{-1}(i) = 2i for 0 <= i <= [(N-1)/2], 2(N-i)-1 otherwise;
// visits the bodies in the chain order 0, N-1, 1, N-2, ...
inline std::vector<int> chain_permutation(int n) {
    if (n < 2) throw ConfigError("chain_permutation: need n >= 2");
    std::vector<int> inv(n), sigma(n);
    for (int i = 0; i < n; ++i) inv[i] = (i <= (n - 1) / 2) ? 2 * i : 2 * (n - i) - 1;
    for (int i = 0; i < n; ++i) sigma[inv[i]] = i;
    return sigma;
}

namespace detail {

// Extract a per-body coordinate track over the fundamental domain nodes
// 0..M/(2N) inclusive.
inline std::vector<std::vector<double>> fundamental_tracks(const SampledLoop& sl,
                                                           double Vec3::*comp) {
    const int half = sl.m / (2 * sl.n);
    std::vector<std::vector<double>> tr(sl.n, std::vector<double>(half + 1));
    for (int i = 0; i < sl.n; ++i)
        for (int j = 0; j <= half; ++j) {
            Vec3 p = sl.nodes[j % sl.m].body(i);
            tr[i][j] = p.*comp;
        }
    return tr;
}

}  // namespace detail

// True when the increments of the given coordinate already follow the chain
// sign pattern (ascending at even chain positions, descending at odd ones) or
// its mirror image; this is exactly the equality case of the rearrangement.
inline bool monotone_pattern_holds(const SampledLoop& sl, double Vec3::*comp, double tol = 0.0) {
    const auto tracks = detail::fundamental_tracks(sl, comp);
    const auto sigma = chain_permutation(sl.n);
    bool plus = true, minus = true;
    for (int pos = 0; pos < sl.n; ++pos) {
        const int body = sigma[pos];
        const int want = (pos % 2 == 0) ? 1 : -1;
        bool up = true, down = true;
        for (size_t j = 0; j + 1 < tracks[body].size(); ++j) {
            const double d = tracks[body][j + 1] - tracks[body][j];
            if (d < -tol) up = false;
            if (d > tol) down = false;
        }
        if (!(want > 0 ? up : down)) plus = false;
        if (!(want > 0 ? down : up)) minus = false;
    }
    return plus || minus;
}

namespace detail {

// Core rearrangement of one coordinate. Returns the rebuilt full-period track
// of body 0 plus matching velocities, leaving the other coordinates to the
// caller. `comp` selects the coordinate being rearranged.
inline void rearrange_coordinate(const SampledLoop& sl, double Vec3::*comp,
                                 std::vector<double>& out_track,
                                 std::vector<double>& out_rate) {
    const int n = sl.n;
    const int m = sl.m;
    const int half = m / (2 * n);

    const auto tracks = fundamental_tracks(sl, comp);

    // cumulative absolute increments per body
    std::vector<std::vector<double>> cum(n, std::vector<double>(half + 1, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 1; j <= half; ++j)
            cum[i][j] = cum[i][j - 1] + std::abs(tracks[i][j] - tracks[i][j - 1]);

    // ascending bodies 0..[(N-1)/2], descending partners; constants C_i fix
    // the boundary matching new_i(0) = new_{N-i}(0), new_i(pi/N) = new_{N-1-i}(pi/N)
    std::vector<double> C(n, 0.0);
    std::vector<int> dir(n, 0);
    const int top = (n - 1) / 2;
    for (int i = 0; i <= top; ++i) dir[i] = 1;
    for (int i = top + 1; i < n; ++i) dir[i] = -1;

    C[0] = 0.0;  // shifted to zero mean at the end
    auto value = [&](int i, int j) { return C[i] + dir[i] * cum[i][j]; };
    for (int i = 0; i <= top; ++i) {
        if (i > 0) C[i] = value(n - i, 0);                      // new_i(0) = new_{N-i}(0)
        if (n - 1 - i == i) break;                              // odd N middle body
        C[n - 1 - i] = value(i, half) + cum[n - 1 - i][half];   // new at pi/N matches
    }

    // rebuild the full-period body-0 track from the fundamental-domain data:
    // window i covers [2 pi i/N, 2 pi (i+1)/N); its first half comes from body
    // i directly and its second half from body N-1-i reflected in time.
    out_track.assign(m, 0.0);
    out_rate.assign(m, 0.0);

    // signed rates from the input increments (forward differences re-centered
    // below by the stitched segments); rate at node j uses the input's
    // spectral velocity magnitude so kinetic quadrature is preserved exactly.
    std::vector<std::vector<double>> rate(n, std::vector<double>(half + 1, 0.0));
    {
        SampledLoop tmp = sl;
        if (!tmp.has_velocities()) fill_velocities_spectral(tmp);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= half; ++j) {
                Vec3 v = tmp.vels[j % m].body(i);
                rate[i][j] = std::abs(v.*comp);
            }
    }

    const int window = m / n;  // nodes per 2 pi / N window
    for (int s = 0; s < m; ++s) {
        const int i = s / window;
        const int u = s - i * window;
        if (u <= half) {
            out_track[s] = value(i, u);
            out_rate[s] = dir[i] * rate[i][u];
        } else {
            const int j = window - u;  // in (0, half)
            out_track[s] = value(n - 1 - i, j);
            out_rate[s] = -dir[n - 1 - i] * rate[n - 1 - i][j];
        }
    }

    // mean shift: [new_0] = 0 over the full period
    double mean = 0.0;
    for (double v : out_track) mean += v;
    mean /= m;
    for (double& v : out_track) v -= mean;
}

inline SampledLoop rearrange(const SampledLoop& sl, double Vec3::*comp, double boundary_tol) {
    require_grid(sl.m, sl.n);
    // precondition: the D_N boundary structure must hold
    const SymmetryClass sym(sl.n, SymmetryKind::DN);
    const double viol = boundary_violation(sl, boundary_conditions(sym));
    if (viol > boundary_tol)
        throw BoundaryMismatch("rearrangement input violates the boundary structure by " +
                               std::to_string(viol));

    std::vector<double> track, rate;
    rearrange_coordinate(sl, comp, track, rate);

    SampledLoop work = sl;
    if (!work.has_velocities()) fill_velocities_spectral(work);

    // assemble the new generating track with the rearranged coordinate
    std::vector<Vec3> q0(sl.m), v0(sl.m);
    for (int k = 0; k < sl.m; ++k) {
        q0[k] = work.nodes[k].body(0);
        v0[k] = work.vels[k].body(0);
        q0[k].*comp = track[k];
        v0[k].*comp = rate[k];
    }
    return expand_choreography(q0, sl.n, &v0);
}

}  // namespace detail

// Vertical rearrangement; valid in any rotating frame.
inline SampledLoop monotone_rearrange_z(const SampledLoop& sl, double boundary_tol = 1e-8) {
    return detail::rearrange(sl, &Vec3::z, boundary_tol);
}

// Same construction along x. Only the non-rotating action comparison applies:
// the rotating kinetic form is not preserved when x is rearranged.
inline SampledLoop monotone_rearrange_x(const SampledLoop& sl, double boundary_tol = 1e-8) {
    return detail::rearrange(sl, &Vec3::x, boundary_tol);
}

}  // namespace chorea
