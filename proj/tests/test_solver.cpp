#include <catch2/catch.hpp>

#include "oracles.hpp"

using namespace chorea;

TEST_CASE("initial guess lands in the requested class") {
    SECTION("figure-eight style seed for N = 3") {
        Problem p = Problem::make(SymmetryClass(3, SymmetryKind::DN),
                                  SignPattern::parse("+-", 3), 0.0, 8, 48);
        const FourierLoop seed = initial_guess(p, 1.0);
        CHECK(seed.y_checkpoint(1) > 0.0);
        CHECK(seed.y_checkpoint(2) < 0.0);
        const auto cls = classify(seed);
        REQUIRE(cls.has_value());
        CHECK(*cls == p.xi);
    }
    SECTION("all-plus class needs only the first sine mode") {
        Problem p = Problem::make(SymmetryClass(4, SymmetryKind::DN),
                                  SignPattern::parse("+++", 4), 0.0, 8, 64);
        const FourierLoop seed = initial_guess(p, 1.0);
        const auto cls = classify(seed);
        REQUIRE(cls.has_value());
        CHECK(*cls == p.xi);
    }
    SECTION("H_N seeds respect the parity constraints") {
        Problem p = Problem::make(SymmetryClass(5, SymmetryKind::HN),
                                  SignPattern::parse("++--", 5), 0.0, 8, 80);
        const FourierLoop seed = initial_guess(p, 1.0);
        const CoeffMask mask = coefficient_constraints(p.sym, seed.order);
        for (int k = 0; k <= seed.order; ++k) {
            if (!mask.a[k]) CHECK(seed.a[k] == 0.0);
            if (!mask.b[k]) CHECK(seed.b[k] == 0.0);
            if (!mask.c[k]) CHECK(seed.c[k] == 0.0);
        }
        const auto cls = classify(seed);
        REQUIRE(cls.has_value());
        CHECK(*cls == p.xi);
    }
    SECTION("incompatible H_N pattern is infeasible") {
        Problem p;
        p.sym = SymmetryClass(3, SymmetryKind::HN);
        p.xi = SignPattern::parse("++", 3);
        p.omega = 0.0;
        p.order = 8;
        p.grid = 48;
        CHECK_THROWS_AS(initial_guess(p, 1.0), InfeasiblePattern);
    }
}

TEST_CASE("problem validation enforces the frame rules") {
    Problem p = Problem::make(SymmetryClass(4, SymmetryKind::HN), SignPattern::parse("+-+", 4),
                              0.0, 8, 64);
    CHECK_NOTHROW(p.validate());
    p.omega = 1.0;
    p.fix_x_mean = false;
    CHECK_THROWS_AS(p.validate(), ConfigError);  // no rotation axis for even H_N

    Problem q = Problem::make(SymmetryClass(3, SymmetryKind::DN), SignPattern::parse("+-", 3),
                              0.5, 8, 48);
    CHECK_NOTHROW(q.validate());
    q.fix_x_mean = true;  // the x mean is only pinned at omega in {0, N}
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q.fix_x_mean = false;
    q.fix_z_mean = false;
    CHECK_THROWS_AS(q.validate(), ConfigError);
}

TEST_CASE("frequency reduction into [0, N]") {
    const int n = 3;
    SECTION("shift by full turns") {
        const OmegaReduction r = normalize_omega(2 * n + 0.5, n);
        CHECK(r.omega == Approx(0.5));
        CHECK(r.turns == 1);
        CHECK_FALSE(r.conjugated);
    }
    SECTION("negative frequencies conjugate") {
        const OmegaReduction r = normalize_omega(-0.7, n);
        CHECK(r.omega == Approx(0.7));
        CHECK(r.conjugated);
    }
    SECTION("already reduced") {
        const OmegaReduction r = normalize_omega(1.2, n);
        CHECK(r.omega == Approx(1.2));
        CHECK(r.turns == 0);
        CHECK_FALSE(r.conjugated);
    }
    SECTION("minimize reduces out-of-range frequencies and maps the loop back") {
        const SignPattern xi = SignPattern::parse("+-", 3);
        Problem direct = Problem::make(SymmetryClass(3, SymmetryKind::DN), xi, 0.4, 10, 96);
        const MinimizerRecord dref = minimize(direct, initial_guess(direct, 1.0));
        REQUIRE(dref.status == SolveStatus::Converged);

        Problem shifted = direct;
        shifted.omega = 0.4 + 2 * n;  // same problem after one full frame turn;
        // the corresponding seed is the frame-shifted twin of the direct seed
        const FourierLoop seed6 = shift_frame(initial_guess(direct, 1.0), -2 * n);
        const MinimizerRecord sref = minimize(shifted, seed6);
        REQUIRE(sref.status == SolveStatus::Converged);
        // the reduced run optimizes over the widened mode band, so the two
        // minima agree to truncation level
        CHECK(sref.action.total == Approx(dref.action.total).epsilon(1e-5));
        const auto scls = classify(sref.loop);
        REQUIRE(scls.has_value());
        CHECK(*scls == xi);
        // the frame identity on the returned loop is exact
        const double back = action_omega(shift_frame(sref.loop, 2 * n), 0.4, 240).total;
        CHECK(sref.action.total == Approx(back).epsilon(1e-12));

        Problem negated = direct;
        negated.omega = -0.4;  // conjugation pairs the negative frequency with -xi
        const MinimizerRecord nref = minimize(negated, initial_guess(direct, 1.0));
        REQUIRE(nref.status == SolveStatus::Converged);
        CHECK(nref.action.total == Approx(dref.action.total).epsilon(1e-9));
        const auto ncls = classify(nref.loop);
        REQUIRE(ncls.has_value());
        CHECK(*ncls == xi);
        CHECK(action_omega(nref.loop, -0.4, 120).total ==
              Approx(nref.action.total).epsilon(1e-12));
    }
    SECTION("kinetic form is equivariant under the reduction") {
        std::mt19937 rng(42);
        const FourierLoop fl = oracles::random_loop(rng, SymmetryClass(n, SymmetryKind::DN), 4);
        const double omega = 2 * n + 0.5;
        const FourierLoop shifted = shift_frame(fl, -2 * n);
        CHECK(kinetic_norm_omega(shifted, omega) ==
              Approx(kinetic_norm_omega(fl, 0.5)).epsilon(1e-12));
        const FourierLoop conj = conjugate_loop(fl);
        CHECK(kinetic_norm_omega(conj, -0.5) ==
              Approx(kinetic_norm_omega(fl, 0.5)).epsilon(1e-12));
    }
}

TEST_CASE("collision monitor structure") {
    SECTION("uniformly separated loops report nothing") {
        const SampledLoop sl = synthesize(ngon_loop(NGonLabel{2, -1}, 5), 40);
        const CollisionReport rep = collision_monitor(sl, 1e-4);
        CHECK(rep.empty());
        CHECK_FALSE(rep.theorem_violation);
        CHECK(rep.min_distance > 0.5);
        REQUIRE(rep.checkpoint_min_distance.size() == 10);
    }
    SECTION("admissible pair at t = 0 for N = 5") {
        FourierLoop fl(SymmetryClass(5, SymmetryKind::DN), 4);
        fl.b[1] = 2.0;
        fl.a[1] = 0.7;
        SampledLoop sl = synthesize(fl, 40);
        // collapse bodies 1 and 4 at the t = 0 node: an admissible {i, N-i} pair
        Configuration& c0 = sl.nodes[0];
        const Vec3 mid = 0.5 * (c0.body(1) + c0.body(4));
        c0.set_body(1, mid);
        c0.set_body(4, mid);
        const CollisionReport rep = collision_monitor(sl, 1e-4);
        REQUIRE_FALSE(rep.empty());
        CHECK_FALSE(rep.theorem_violation);
        CHECK(rep.events.front().i == 1);
        CHECK(rep.events.front().j == 4);
        CHECK(rep.events.front().allowed);
        CHECK(rep.events.front().at_checkpoint);
    }
    SECTION("near-collision at an interior moment is a theorem violation") {
        FourierLoop fl(SymmetryClass(5, SymmetryKind::DN), 4);
        fl.b[1] = 2.0;
        fl.a[1] = 0.7;
        SampledLoop sl = synthesize(fl, 40);
        Configuration& c = sl.nodes[3];  // not a checkpoint node (stride = 4)
        const Vec3 mid = 0.5 * (c.body(0) + c.body(2));
        c.set_body(0, mid);
        c.set_body(2, mid);
        const CollisionReport rep = collision_monitor(sl, 1e-4);
        REQUIRE_FALSE(rep.empty());
        CHECK(rep.theorem_violation);
    }
    SECTION("disallowed pair at a checkpoint is a theorem violation") {
        FourierLoop fl(SymmetryClass(5, SymmetryKind::DN), 4);
        fl.b[1] = 2.0;
        fl.a[1] = 0.7;
        SampledLoop sl = synthesize(fl, 40);
        Configuration& c0 = sl.nodes[0];
        const Vec3 mid = 0.5 * (c0.body(1) + c0.body(3));  // {1,3} is not {i, N-i}
        c0.set_body(1, mid);
        c0.set_body(3, mid);
        const CollisionReport rep = collision_monitor(sl, 1e-4);
        CHECK(rep.theorem_violation);
    }
}

TEST_CASE("divergence detector") {
    Problem p = Problem::make(SymmetryClass(3, SymmetryKind::DN), SignPattern::parse("+-", 3),
                              2.0, 8, 48);
    SECTION("fires on the expanding polygon family") {
        std::deque<std::pair<double, double>> history;
        double lambda = 1.0;
        SampledLoop current;
        for (int j = 0; j < 20; ++j) {
            const double action = 13.0 / lambda;
            history.push_back({action, lambda * ngon_radius(3)});
            current = synthesize(ngon_loop(NGonLabel{2, -1}, 3, lambda), 48);
            lambda *= 2.0;
        }
        const auto ev = divergence_detector(history, current, p);
        REQUIRE(ev.has_value());
        CHECK(ev->shape_distance < 1e-12);
        CHECK(ev->final_action < 1e-3);
        CHECK(ev->label.k == 2);
    }
    SECTION("silent for non-matching classes") {
        Problem q = p;
        q.xi = SignPattern::parse("++", 3);
        std::deque<std::pair<double, double>> history;
        for (int j = 0; j < 20; ++j) history.push_back({13.0 / (1 << j), double(1 << j)});
        const SampledLoop current = synthesize(ngon_loop(NGonLabel{2, -1}, 3, 1 << 19), 48);
        CHECK_FALSE(divergence_detector(history, current, q).has_value());
    }
    SECTION("disabled away from integer frequencies") {
        Problem q = Problem::make(SymmetryClass(3, SymmetryKind::DN), SignPattern::parse("+-", 3),
                                  1.5, 8, 48);
        std::deque<std::pair<double, double>> history;
        for (int j = 0; j < 20; ++j) history.push_back({13.0 / (1 << j), double(1 << j)});
        const SampledLoop current = synthesize(ngon_loop(NGonLabel{2, -1}, 3, 1 << 19), 48);
        CHECK_FALSE(divergence_detector(history, current, q).has_value());
    }
}

TEST_CASE("minimization of the three-body chain class converges") {
    Problem p = Problem::make(SymmetryClass(3, SymmetryKind::DN), SignPattern::parse("+-", 3),
                              0.0, 14, 96);
    p.tol.grad_tol = 1e-8;
    const MinimizerRecord rec = minimize(p, initial_guess(p, 1.0));
    REQUIRE(rec.status == SolveStatus::Converged);
    CHECK(rec.grad_norm <= 1e-8);
    const auto cls = classify(rec.loop);
    REQUIRE(cls.has_value());
    CHECK(*cls == p.xi);
    // the record action is reproducible from the loop
    CHECK(rec.action.total == Approx(action_omega(rec.loop, 0.0, 96).total).epsilon(1e-14));
    // no near-collisions anywhere on the minimizer
    const SampledLoop sl = synthesize(rec.loop, 96);
    CHECK(collision_monitor(sl, 1e-3).empty());
}

TEST_CASE("converged minimizers are fixed points of the vertical rearrangement") {
    Problem p = Problem::make(SymmetryClass(3, SymmetryKind::DN), SignPattern::parse("+-", 3),
                              0.0, 14, 96);
    const MinimizerRecord rec = minimize(p, initial_guess(p, 1.0));
    REQUIRE(rec.status == SolveStatus::Converged);
    const SampledLoop sl = synthesize(rec.loop, 96);
    const SampledLoop rearranged = monotone_rearrange_z(sl);
    const double before = sampled_action_omega(sl, 0.0);
    const double after = sampled_action_omega(rearranged, 0.0);
    CHECK(std::abs(after - before) < 1e-8 * std::abs(before));
}

TEST_CASE("minimization rejects a start outside the class") {
    Problem p = Problem::make(SymmetryClass(3, SymmetryKind::DN), SignPattern::parse("+-", 3),
                              0.0, 8, 48);
    Problem q = p;
    q.xi = SignPattern::parse("++", 3);
    const FourierLoop wrong = initial_guess(q, 1.0);
    CHECK_THROWS_AS(minimize(p, wrong), PreconditionViolated);
}

TEST_CASE("five-body H_N family folds out of the plane only in rotating frames") {
    const SignPattern xi = ngon_pattern(NGonLabel{2, -1}, 5);
    REQUIRE(hn_compatible(xi, 5));
    auto solve = [&](double omega) {
        Problem p = Problem::make(SymmetryClass(5, SymmetryKind::HN), xi, omega, 12, 160);
        return minimize(p, initial_guess(p, 1.0));
    };
    const MinimizerRecord fixed = solve(0.0);
    REQUIRE(fixed.status == SolveStatus::Converged);
    const SampledLoop sl0 = synthesize(fixed.loop, 160);
    double xmax = 0.0;
    for (int k = 0; k < sl0.m; ++k) xmax = std::max(xmax, std::abs(sl0.nodes[k].body(0).x));
    CHECK(xmax < 1e-12);  // confined to the yz-plane in the fixed frame

    const MinimizerRecord rot = solve(0.5);
    REQUIRE(rot.status == SolveStatus::Converged);
    const SampledLoop sl1 = synthesize(rot.loop, 160);
    double xmax1 = 0.0;
    for (int k = 0; k < sl1.m; ++k) xmax1 = std::max(xmax1, std::abs(sl1.nodes[k].body(0).x));
    CHECK(xmax1 > 0.05);  // the loops fold toward the horizontal plane
    CHECK(rot.action.total < fixed.action.total);
}

TEST_CASE("integer frequency with the matching class diverges toward the polygon") {
    Problem p = Problem::make(SymmetryClass(3, SymmetryKind::DN), SignPattern::parse("+-", 3),
                              2.0, 10, 96);
    p.tol.max_iters = 6000;
    const MinimizerRecord rec = minimize(p, initial_guess(p, 1.0));
    REQUIRE(rec.status == SolveStatus::Diverging);
    REQUIRE(rec.divergence.has_value());
    CHECK(rec.divergence->final_action < 1e-3);
    CHECK(rec.divergence->shape_distance < 1e-3);
    CHECK(rec.divergence->label.k == 2);
    // the action trace decreases monotonically
    const auto& tr = rec.divergence->action_trace;
    REQUIRE(tr.size() > 2);
    for (size_t i = 1; i < tr.size(); ++i) CHECK(tr[i] <= tr[i - 1] + 1e-12);
}
