#include <catch2/catch.hpp>

#include "oracles.hpp"

using namespace chorea;

TEST_CASE("classify reads the checkpoint signs") {
    const SymmetryClass sym(4, SymmetryKind::DN);
    FourierLoop fl(sym, 3);
    fl.b[1] = 1.0;  // y_0 = sin t > 0 on (0, pi)
    const auto p = classify(synthesize(fl, 32));
    REQUIRE(p.has_value());
    CHECK(p->xi == std::vector<int>{1, 1, 1});
    CHECK(p->str() == "+++");
}

TEST_CASE("classify returns degenerate on checkpoint zeros") {
    const SymmetryClass sym(3, SymmetryKind::DN);
    FourierLoop fl(sym, 3);
    fl.b[3] = 1.0;  // sin(3t) vanishes at every checkpoint k pi/3
    CHECK_FALSE(classify(synthesize(fl, 24)).has_value());
    CHECK_FALSE(classify(fl).has_value());
    fl.a[1] = 0.5;  // horizontal content does not affect the classification
    CHECK_FALSE(classify(fl).has_value());
}

TEST_CASE("five-body polygon classes match the published patterns") {
    CHECK(ngon_pattern(NGonLabel{2, -1}, 5).xi == std::vector<int>{1, 1, -1, -1});
    CHECK(ngon_pattern(NGonLabel{4, -1}, 5).xi == std::vector<int>{1, -1, 1, -1});
    SECTION("closed-form cross-check: xi_i = sign(sin(k i pi / N)) for the minus label") {
        for (int k : {1, 2, 3, 4}) {
            if (gcd_ll(k, 5) != 1) continue;
            const SignPattern p = ngon_pattern(NGonLabel{k, -1}, 5);
            for (int i = 1; i <= 4; ++i)
                CHECK(p.xi[i - 1] == (std::sin(k * i * kPi / 5) > 0 ? 1 : -1));
        }
    }
    SECTION("plus and minus labels are negations") {
        for (int n : {3, 5, 7}) {
            for (int k = 1; k < n; ++k) {
                if (gcd_ll(k, n) != 1) continue;
                CHECK(ngon_pattern(NGonLabel{k, +1}, n) ==
                      negate(ngon_pattern(NGonLabel{k, -1}, n)));
            }
        }
    }
}

TEST_CASE("xi_star flips the odd checkpoints") {
    SignPattern p;
    p.xi = {1, 1, -1, -1};
    CHECK(xi_star(p).xi == std::vector<int>{-1, 1, 1, -1});
    p.xi = {1, -1, 1, -1};
    CHECK(xi_star(p).xi == std::vector<int>{-1, -1, -1, -1});
    SECTION("involution") {
        std::mt19937 rng(9);
        std::bernoulli_distribution coin;
        for (int rep = 0; rep < 20; ++rep) {
            SignPattern q;
            for (int i = 0; i < 6; ++i) q.xi.push_back(coin(rng) ? 1 : -1);
            CHECK(xi_star(xi_star(q)) == q);
        }
    }
}

TEST_CASE("negation pairs with the conjugated loop") {
    SignPattern p;
    p.xi = {1, -1};
    CHECK(negate(p).xi == std::vector<int>{-1, 1});
    CHECK(negate(negate(p)) == p);

    std::mt19937 rng(41);
    for (int rep = 0; rep < 10; ++rep) {
        const FourierLoop fl = oracles::random_loop(rng, SymmetryClass(4, SymmetryKind::DN), 6);
        const auto cls = classify(fl);
        if (!cls) continue;
        const auto conj = classify(conjugate_loop(fl));
        REQUIRE(conj.has_value());
        CHECK(*conj == negate(*cls));
    }
}

TEST_CASE("H_N compatibility rule") {
    SignPattern p;
    p.xi = {1, -1};
    CHECK(hn_compatible(p, 3));
    p.xi = {1, 1};
    CHECK_FALSE(hn_compatible(p, 3));
    p.xi = {1, -1, 1};
    CHECK(hn_compatible(p, 4));
    p.xi = {1, -1, -1};
    CHECK_FALSE(hn_compatible(p, 4));
    SECTION("polygon classes are H_N compatible for odd N and even winding") {
        // the half-turn time reflection maps e^{-Jkt} to (-1)^k e^{-Jkt}, so the
        // single-harmonic loop carries the extra symmetry exactly when k is even
        for (int n : {3, 5, 7, 9}) {
            for (int k = 1; k < n; ++k) {
                if (gcd_ll(k, n) != 1) continue;
                CHECK(hn_compatible(ngon_pattern(NGonLabel{k, +1}, n), n) == (k % 2 == 0));
                CHECK(hn_compatible(ngon_pattern(NGonLabel{k, -1}, n), n) == (k % 2 == 0));
            }
        }
    }
}

TEST_CASE("classification is invariant under rotations about the y-axis") {
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    for (int rep = 0; rep < 10; ++rep) {
        const FourierLoop fl = oracles::random_loop(rng, SymmetryClass(5, SymmetryKind::DN), 6);
        SampledLoop sl = synthesize(fl, 40);
        const auto before = classify(sl);
        if (!before) continue;
        const Mat3 rot = Mat3::rotate_y(ang(rng));
        for (auto& c : sl.nodes)
            for (int i = 0; i < sl.n; ++i) c.set_body(i, rot * c.body(i));
        const auto after = classify(sl);
        REQUIRE(after.has_value());
        CHECK(*after == *before);
    }
}

TEST_CASE("the full-turn frame change acts as the star involution on classes") {
    std::mt19937 rng(31415);
    for (int n : {3, 4, 5}) {
        for (int rep = 0; rep < 6; ++rep) {
            const FourierLoop fl = oracles::random_loop(rng, SymmetryClass(n, SymmetryKind::DN), 5);
            const auto cls = classify(fl);
            if (!cls) continue;
            const auto shifted = classify(shift_frame(fl, n));
            REQUIRE(shifted.has_value());
            CHECK(*shifted == xi_star(*cls));
        }
    }
}

TEST_CASE("sign pattern parsing and printing") {
    CHECK(SignPattern::parse("+-", 3).xi == std::vector<int>{1, -1});
    CHECK(SignPattern::parse("1,-1,1,-1", 5).xi == std::vector<int>{1, -1, 1, -1});
    CHECK_THROWS_AS(SignPattern::parse("++", 4), ConfigError);
    CHECK_THROWS_AS(SignPattern::parse("+x", 3), ConfigError);
    SignPattern p;
    p.xi = {1, 1, -1, -1};
    CHECK(p.str() == "++--");
}
