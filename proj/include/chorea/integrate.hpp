#pragma once

#include <functional>
#include <vector>

#include "chorea/nbody.hpp"

// Adaptive Dormand-Prince 5(4) integration of the N-body equations of motion
// in a frame rotating with angular velocity omega (omega = 0: inertial frame).

namespace chorea {

struct BodyState {
    Configuration q;
    Velocity v;
};

namespace detail {

inline std::vector<double> pack_state(const BodyState& s) {
    const int n = s.q.n;
    std::vector<double> y(6 * n);
    for (int i = 0; i < n; ++i) {
        const Vec3 p = s.q.body(i), w = s.v.body(i);
        y[3 * i] = p.x; y[3 * i + 1] = p.y; y[3 * i + 2] = p.z;
        y[3 * n + 3 * i] = w.x; y[3 * n + 3 * i + 1] = w.y; y[3 * n + 3 * i + 2] = w.z;
    }
    return y;
}

inline BodyState unpack_state(const std::vector<double>& y, int n) {
    BodyState s{Configuration(n), Velocity(n)};
    for (int i = 0; i < n; ++i) {
        s.q.set_body(i, {y[3 * i], y[3 * i + 1], y[3 * i + 2]});
        s.v.set_body(i, {y[3 * n + 3 * i], y[3 * n + 3 * i + 1], y[3 * n + 3 * i + 2]});
    }
    return s;
}

inline std::vector<double> nbody_rhs(const std::vector<double>& y, int n, double omega,
                                     double floor) {
    const BodyState s = unpack_state(y, n);
    const auto [azeta, az] = rotating_accel(s.q, s.v, omega, floor);
    std::vector<double> dy(6 * n);
    for (int i = 0; i < n; ++i) {
        dy[3 * i] = y[3 * n + 3 * i];
        dy[3 * i + 1] = y[3 * n + 3 * i + 1];
        dy[3 * i + 2] = y[3 * n + 3 * i + 2];
        dy[3 * n + 3 * i] = azeta[i].real();
        dy[3 * n + 3 * i + 1] = azeta[i].imag();
        dy[3 * n + 3 * i + 2] = az[i];
    }
    return dy;
}

}  // namespace detail

// Integrates from t0 to t1 (either direction); calls `observer(t, state)` after
// every accepted step when provided.
inline BodyState integrate_rotating(
    const BodyState& s0, double t0, double t1, double omega, double rtol = 1e-12,
    double atol = 1e-12, double floor = kDistanceFloor,
    const std::function<void(double, const BodyState&)>& observer = nullptr) {
    // Dormand-Prince 5(4) tableau
    // the stage times are not needed: the right-hand side is autonomous
    static const double A[7][6] = {
        {0, 0, 0, 0, 0, 0},
        {1.0 / 5, 0, 0, 0, 0, 0},
        {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
        {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double B5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192,
                                 -2187.0 / 6784, 11.0 / 84, 0};
    static const double B4[7] = {5179.0 / 57600, 0, 7571.0 / 16695, 393.0 / 640,
                                 -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

    const int n = s0.q.n;
    std::vector<double> y = detail::pack_state(s0);
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::min(1e-3, std::abs(t1 - t0));
    const int dim = static_cast<int>(y.size());
    std::vector<std::vector<double>> k(7, std::vector<double>(dim));
    std::vector<double> ytmp(dim), y5(dim), y4(dim);

    int guard = 0;
    while (dir * (t1 - t) > 1e-15 * std::max(1.0, std::abs(t1))) {
        if (++guard > 20000000) throw PreconditionViolated("integrate_rotating: step limit");
        if (dir * (t + h - t1) > 0) h = t1 - t;
        k[0] = detail::nbody_rhs(y, n, omega, floor);
        for (int s = 1; s < 7; ++s) {
            for (int d = 0; d < dim; ++d) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j) acc += A[s][j] * k[j][d];
                ytmp[d] = y[d] + h * acc;
            }
            k[s] = detail::nbody_rhs(ytmp, n, omega, floor);
        }
        double err = 0.0;
        for (int d = 0; d < dim; ++d) {
            double s5 = 0.0, s4 = 0.0;
            for (int j = 0; j < 7; ++j) {
                s5 += B5[j] * k[j][d];
                s4 += B4[j] * k[j][d];
            }
            y5[d] = y[d] + h * s5;
            y4[d] = y[d] + h * s4;
            const double sc = atol + rtol * std::max(std::abs(y[d]), std::abs(y5[d]));
            const double e = (y5[d] - y4[d]) / sc;
            err = std::max(err, std::abs(e));
        }
        if (err <= 1.0) {
            t += h;
            y = y5;
            if (observer) observer(t, detail::unpack_state(y, n));
        }
        const double fac = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, fac));
    }
    return detail::unpack_state(y, n);
}

}  // namespace chorea
