#include <catch2/catch.hpp>

#include "oracles.hpp"

using namespace chorea;

TEST_CASE("equation-of-motion residual separates solutions from non-solutions") {
    SECTION("rotating polygon orbits are exact") {
        for (auto [n, k] : std::vector<std::pair<int, int>>{{3, 2}, {5, 2}, {5, 4}}) {
            const NGonOrbit orb = build_rotating_ngon(NGonLabel{k, -1}, n, k + 0.5, 8);
            const SampledLoop sl = synthesize(orb.loop, 16 * n);
            CHECK(eom_residual(sl, orb.omega) < 1e-8);
        }
    }
    SECTION("generic loops are far from solving the equations") {
        std::mt19937 rng(2);
        const FourierLoop fl = oracles::random_loop(rng, SymmetryClass(3, SymmetryKind::DN), 6);
        const SampledLoop sl = synthesize(fl, 96);
        CHECK(eom_residual(sl, 0.0) > 0.1);
    }
}

TEST_CASE("monotonicity classification of generating tracks") {
    const SymmetryClass sym(3, SymmetryKind::DN);
    SECTION("strictly monotone vertical track") {
        FourierLoop fl(sym, 3);
        fl.b[1] = 2.0;
        fl.c[1] = -1.0;  // z = -cos t
        CHECK(monotonicity_check(synthesize(fl, 96), 'z') == Monotonicity::StrictMonotone);
    }
    SECTION("flat vertical track") {
        FourierLoop fl(sym, 3);
        fl.b[1] = 2.0;
        fl.a[1] = 0.5;
        CHECK(monotonicity_check(synthesize(fl, 96), 'z') == Monotonicity::Constant);
    }
    SECTION("turning track is violated") {
        FourierLoop fl(sym, 3);
        fl.b[1] = 2.0;
        fl.c[2] = -1.0;  // z = -cos 2t turns at pi/2
        CHECK(monotonicity_check(synthesize(fl, 96), 'z') == Monotonicity::Violated);
    }
}

TEST_CASE("planarity fit") {
    const SymmetryClass sym(3, SymmetryKind::DN);
    SECTION("planar eight-like curve in the yz-plane") {
        FourierLoop fl(sym, 4);
        fl.b[2] = 1.0;
        fl.c[1] = -1.2;
        const PlaneFit fit = planarity_check(synthesize(fl, 96));
        CHECK(fit.residual < 1e-10);
        CHECK(std::abs(fit.normal.x) == Approx(1.0).margin(1e-10));
        CHECK(fit.xz_reflection_symmetric);
    }
    SECTION("spatial loop has order-one residual") {
        FourierLoop fl(sym, 4);
        fl.a[1] = 1.0;
        fl.b[2] = 1.0;
        fl.c[2] = 1.0;  // genuinely three-dimensional content
        const PlaneFit fit = planarity_check(synthesize(fl, 96));
        CHECK(fit.residual > 1e-2);
    }
    SECTION("residual is invariant under rigid rotations") {
        std::mt19937 rng(3);
        const FourierLoop fl = oracles::random_loop(rng, sym, 5);
        SampledLoop sl = synthesize(fl, 96);
        const double base = planarity_check(sl).residual;
        const Mat3 rot = Mat3::rotate_y(0.9) * Mat3::rotate_z(0.4);
        for (auto& c : sl.nodes)
            for (int i = 0; i < sl.n; ++i) c.set_body(i, rot * c.body(i));
        CHECK(planarity_check(sl).residual == Approx(base).margin(1e-12));
    }
    SECTION("degenerate loops are rejected") {
        FourierLoop fl(sym, 2);
        CHECK_THROWS_AS(planarity_check(synthesize(fl, 24)), DegenerateLoop);
    }
}

TEST_CASE("asymptotic exponent fits") {
    SECTION("closed-form collision arc") {
        std::vector<double> ts, rs;
        double t = 0.05;
        for (int i = 0; i < 8; ++i) {
            ts.push_back(t);
            rs.push_back(oracles::parabolic_separation(t));
            t *= 0.5;
        }
        const auto [expn, c1] = sundman_fit(ts, rs);
        CHECK(expn == Approx(2.0 / 3.0).margin(1e-6));
        CHECK(c1 == Approx(std::cbrt(9.0)).margin(1e-6));
    }
    SECTION("linear approach flags a non-gravitational exponent") {
        std::vector<double> ts, rs;
        for (double t = 0.05; t > 1e-4; t *= 0.5) {
            ts.push_back(t);
            rs.push_back(3.0 * t);
        }
        const auto [expn, c1] = sundman_fit(ts, rs);
        CHECK(expn == Approx(1.0).margin(1e-9));
        CHECK(c1 == Approx(3.0).margin(1e-9));
    }
    SECTION("needs at least three samples") {
        CHECK_THROWS_AS(sundman_fit({0.1, 0.05}, {1.0, 0.6}), InsufficientSamples);
    }
}

TEST_CASE("regularizability matching conditions") {
    using oracles::ArcSpec;
    using oracles::closed_form_side;
    SECTION("symmetric collision-ejection arc passes with tiny deltas") {
        ArcSpec arc;
        arc.theta = 1.1;
        arc.phi = kPi / 2;  // planar pair
        const auto rep =
            regularizability_check(closed_form_side(arc, false), closed_form_side(arc, true));
        CHECK(rep.pass);
        CHECK(rep.dphi < 1e-6);
        CHECK(rep.dtheta_mod < 1e-6);
        CHECK(rep.dE < 1e-6);
        CHECK(std::abs(rep.before.phidot) < 1e-6);
        CHECK(std::abs(rep.after.thetadot) < 1e-6);
        CHECK(rep.center_c1_residual < 1e-6);
        CHECK(rep.before.r_exponent == Approx(2.0 / 3.0).margin(1e-6));
    }
    SECTION("azimuthal mismatch fails") {
        ArcSpec in, out;
        in.theta = 1.1;
        out.theta = 1.1 + 0.3;
        const auto rep =
            regularizability_check(closed_form_side(in, false), closed_form_side(out, true));
        CHECK_FALSE(rep.pass);
        CHECK(rep.dtheta_mod == Approx(0.3).margin(1e-6));
        CHECK(rep.dphi < 1e-6);
    }
    SECTION("energy jump fails") {
        ArcSpec in, out;
        out.E0 = 0.5;
        const auto rep =
            regularizability_check(closed_form_side(in, false), closed_form_side(out, true));
        CHECK_FALSE(rep.pass);
        CHECK(rep.dE == Approx(0.5).margin(1e-3));
    }
    SECTION("nonvanishing polar rate fails") {
        ArcSpec in, out;
        out.phidot = 0.1;
        const auto rep =
            regularizability_check(closed_form_side(in, false), closed_form_side(out, true));
        CHECK_FALSE(rep.pass);
        CHECK(std::abs(rep.after.phidot) == Approx(0.1).margin(1e-4));
        CHECK(std::abs(rep.before.phidot) < 1e-8);
    }
    SECTION("planar arcs have identically matched polar angles") {
        ArcSpec arc;  // phi = pi/2 on both sides by construction
        const auto rep =
            regularizability_check(closed_form_side(arc, false), closed_form_side(arc, true));
        CHECK(rep.before.phi == Approx(kPi / 2).margin(1e-9));
        CHECK(rep.dphi < 1e-9);
    }
}

TEST_CASE("refined collision samples reproduce the two-body asymptotics") {
    // two-body near-parabolic encounter integrated inward from just-outside data
    const double t1 = 0.3;
    const double sep = oracles::parabolic_separation(t1);
    const double rate = oracles::parabolic_separation_rate(t1);
    BodyState cur{Configuration(2), Velocity(2)};
    cur.q.set_body(0, {0.5 * sep, 0, 0});
    cur.q.set_body(1, {-0.5 * sep, 0, 0});
    cur.v.set_body(0, {0.5 * rate, 0, 0});
    cur.v.set_body(1, {-0.5 * rate, 0, 0});
    std::vector<double> ts, rs;
    double tcur = t1;
    for (double dt = 0.15; ts.size() < 7; dt *= 0.5) {
        cur = integrate_rotating(cur, tcur, dt, 0.0, 1e-12, 1e-12);
        tcur = dt;
        ts.push_back(dt);
        rs.push_back(body_distance(cur.q, 0, 1));
    }
    const auto [expn, c1] = sundman_fit(ts, rs);
    CHECK(expn == Approx(2.0 / 3.0).margin(0.02));
    CHECK(c1 == Approx(std::cbrt(9.0)).epsilon(0.05));
}

TEST_CASE("loop-level regularizability refines both sides of an embedded collision") {
    // two-body carrier loop holding the closed-form collision-ejection arc
    // around t = pi; node states away from the collision are exact solution
    // data, which is all the refiner consumes
    const int m = 512;
    const double theta0 = 0.7;
    const Vec3 u{std::cos(theta0), std::sin(theta0), 0.0};
    SampledLoop carrier;
    carrier.n = 2;
    carrier.m = m;
    carrier.nodes.assign(m, Configuration(2));
    carrier.vels.assign(m, Velocity(2));
    for (int k = 0; k < m; ++k) {
        const double tau = carrier.time(k) - kPi;
        const double sep = oracles::parabolic_separation(std::max(std::abs(tau), 1e-9));
        const double rate = (tau >= 0 ? 1.0 : -1.0) *
                            oracles::parabolic_separation_rate(std::max(std::abs(tau), 1e-9));
        carrier.nodes[k].set_body(0, (0.5 * sep) * u);
        carrier.nodes[k].set_body(1, (-0.5 * sep) * u);
        carrier.vels[k].set_body(0, (0.5 * rate) * u);
        carrier.vels[k].set_body(1, (-0.5 * rate) * u);
    }
    const RegularizabilityReport rep = regularizability_check(carrier, 0.0, kPi, 0, 1);
    CHECK(rep.pass);
    CHECK(rep.dtheta_mod < 1e-6);
    CHECK(rep.dE < 1e-6);
    CHECK(rep.before.r_exponent == Approx(2.0 / 3.0).margin(1e-4));
}

TEST_CASE("reintegration closes exact orbits") {
    const NGonOrbit orb = build_rotating_ngon(NGonLabel{2, -1}, 3, 2.5, 4);
    const SampledLoop sl = synthesize(orb.loop, 48);
    CHECK(reintegration_closure(sl, 2.5) < 1e-8);
}

TEST_CASE("diagnostics do not mutate their input") {
    std::mt19937 rng(8);
    const FourierLoop fl = oracles::random_loop(rng, SymmetryClass(3, SymmetryKind::DN), 5);
    const SampledLoop sl = synthesize(fl, 96);
    const SampledLoop copy = sl;
    (void)eom_residual(sl, 0.3);
    (void)monotonicity_check(sl, 'x');
    (void)planarity_check(sl);
    (void)collision_monitor(sl, 1e-4);
    CHECK(loop_max_difference(sl, copy) == 0.0);
    for (int k = 0; k < sl.m; ++k)
        for (int i = 0; i < sl.n; ++i)
            CHECK(norm(sl.vels[k].body(i) - copy.vels[k].body(i)) == 0.0);
}

TEST_CASE("rearranged loops never report a violated vertical structure") {
    std::mt19937 rng(9);
    for (int rep = 0; rep < 5; ++rep) {
        const FourierLoop fl = oracles::random_loop(rng, SymmetryClass(4, SymmetryKind::DN), 6);
        const SampledLoop out = monotone_rearrange_z(synthesize(fl, 64));
        CHECK(monotonicity_check(out, 'z') != Monotonicity::Violated);
    }
}
