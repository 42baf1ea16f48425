#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "sqf/progressions.hpp"

using namespace sqf;

namespace {

// Literal S(x;q,a): scan n <= x, test squarefreeness by trial division.
int64_t s_direct(int64_t x, int64_t q, int64_t a) {
    int64_t count = 0;
    for (int64_t n = 1; n <= x; ++n) {
        if (n % q != mod_floor(a, q)) continue;
        bool sf = true;
        for (int64_t d = 2; d * d <= n; ++d) {
            if (n % (d * d) == 0) {
                sf = false;
                break;
            }
        }
        if (sf) ++count;
    }
    return count;
}

i128 t_direct(const ProgressionProfile& p) {
    i128 t = 0;
    for (int64_t c : p.counts) t += static_cast<i128>(c) * c;
    return t;
}

}  // namespace

TEST_CASE("residue counts at small anchor points") {
    MobiusTable t = sieve_mobius(100);
    ProgressionProfile p20 = profile(t, 20, 4);
    CHECK(p20.count_for(1) == 4);   // 1, 5, 13, 17
    CHECK(p20.count_for(3) == 5);   // 3, 7, 11, 15, 19
    CHECK(p20.total == 9);
    ProgressionProfile p10 = profile(t, 10, 3);
    CHECK(p10.count_for(1) == 3);   // 1, 7, 10
    CHECK(p10.count_for(2) == 2);   // 2, 5
    ProgressionProfile p1 = profile(t, 10, 1);
    CHECK(p1.count_for(1) == 7);    // all squarefree n <= 10
    CHECK(p1.total == 7);
}

TEST_CASE("counts match a literal scan and respect the ceiling") {
    MobiusTable t = sieve_mobius(2000);
    for (int64_t q : {int64_t{1}, int64_t{4}, int64_t{9}, int64_t{12}, int64_t{35}}) {
        for (int64_t x : {int64_t{q}, int64_t{97}, int64_t{1000}}) {
            ProgressionProfile p = profile(t, x, q);
            int64_t total = 0;
            for (size_t i = 0; i < p.units.elements.size(); ++i) {
                int64_t a = p.units.elements[i];
                INFO("x = ", x, " q = ", q, " a = ", a);
                REQUIRE(p.counts[i] == s_direct(x, q, a));
                REQUIRE(p.counts[i] <= x / q + 1);
                total += p.counts[i];
            }
            CHECK(p.total == total);
        }
    }
}

TEST_CASE("error terms recenter the counts") {
    MobiusTable t = sieve_mobius(100);
    ProgressionProfile p1 = profile(t, 10, 1);
    double c1 = 6.0 / (std::numbers::pi * std::numbers::pi);
    CHECK(error_term(p1, 1) == doctest::Approx(7.0 - 10.0 * c1).epsilon(1e-14));
    ProgressionProfile p20 = profile(t, 20, 4);
    CHECK(error_term(p20, 1) == doctest::Approx(4.0 - p20.cq * 5.0).epsilon(1e-14));
    // Defining identity: count = c_q x/q + E for every class.
    for (int64_t a : p20.units.elements) {
        CHECK(static_cast<double>(p20.count_for(a)) ==
              doctest::Approx(p20.expected_per_class() + error_term(p20, a)).epsilon(1e-14));
    }
}

TEST_CASE("variance report at frozen anchors") {
    MobiusTable t = sieve_mobius(100);
    VarianceReport r3 = variance(profile(t, 10, 3));
    CHECK(r3.phi == 2);
    CHECK(r3.T == i128{13});
    CHECK(r3.centered_variance == Rat128(1, 2));
    VarianceReport r1 = variance(profile(t, 10, 1));
    CHECK(r1.T == i128{49});
    CHECK(r1.centered_variance == Rat128(0, 1));
}

TEST_CASE("hand-built uniform profile has zero centered variance") {
    ProgressionProfile p;
    p.x = 12;
    p.q = 4;
    p.units = unit_group(4);
    p.counts = {3, 3};
    p.total = 6;
    p.cq = c_constant(4);
    VarianceReport r = variance(p);
    CHECK(r.centered_variance == Rat128(0, 1));
    CHECK(r.T == i128{18});
}

TEST_CASE("pair-correlation route to T never reads squarefree flags yet agrees") {
    MobiusTable t = sieve_mobius(100000);
    for (int64_t q : {int64_t{1}, int64_t{2}, int64_t{7}, int64_t{30}, int64_t{97}}) {
        for (int64_t x : {int64_t{100}, int64_t{1000}, int64_t{10000}}) {
            if (q > x) continue;
            INFO("x = ", x, " q = ", q);
            REQUIRE(t_via_convolution(t, x, q) == t_direct(profile(t, x, q)));
        }
    }
    CHECK(t_via_convolution(t, 100000, 101) == t_direct(profile(t, 100000, 101)));
}

TEST_CASE("exact centered variance matches the integer definition") {
    MobiusTable t = sieve_mobius(100000);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int64_t> pick_q(1, 200);
    std::uniform_int_distribution<int64_t> pick_x(1, 100000);
    for (int trial = 0; trial < 40; ++trial) {
        int64_t q = pick_q(rng);
        int64_t x = std::max<int64_t>(q, pick_x(rng));
        ProgressionProfile p = profile(t, x, q);
        VarianceReport r = variance(p);
        // phi^2 * centered = sum over classes of (phi * S_a - total)^2.
        i128 lhs = 0;
        for (int64_t c : p.counts) {
            i128 d = static_cast<i128>(r.phi) * c - p.total;
            lhs += d * d;
        }
        INFO("x = ", x, " q = ", q);
        REQUIRE(r.centered_variance == Rat128(lhs, static_cast<i128>(r.phi) * r.phi));
    }
}

TEST_CASE("both closed forms for V agree to rounding") {
    MobiusTable t = sieve_mobius(100000);
    for (int64_t q : {int64_t{3}, int64_t{8}, int64_t{97}, int64_t{200}}) {
        for (int64_t x : {int64_t{1000}, int64_t{100000}}) {
            ProgressionProfile p = profile(t, x, q);
            double scale = std::max(1.0, p.cq * p.cq * static_cast<double>(x) *
                                             static_cast<double>(x) /
                                             (static_cast<double>(q) * static_cast<double>(q)));
            INFO("x = ", x, " q = ", q);
            REQUIRE(equivalence_check(p) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("rearranged correlations at frozen anchors") {
    MobiusTable t = sieve_mobius(100);
    ProgressionProfile p = profile(t, 10, 3);
    CHECK(t_gamma(p, ResidueBijection::identity()) == i128{13});
    CHECK(t_gamma(p, ResidueBijection::mul_unit(2)) == i128{12});
    CHECK(v_gamma(p, ResidueBijection::identity()) ==
          doctest::Approx(variance(p).V).epsilon(1e-14));
}

TEST_CASE("rearrangement inequalities and orientation symmetry") {
    MobiusTable t = sieve_mobius(20000);
    std::mt19937_64 rng(11);
    for (int64_t q : {int64_t{12}, int64_t{35}, int64_t{97}, int64_t{144}}) {
        ProgressionProfile p = profile(t, 20000, q);
        VarianceReport r = variance(p);
        i128 T = r.T;
        std::vector<ResidueBijection> gammas = {
            ResidueBijection::identity(), ResidueBijection::inverse(),
            ResidueBijection::random_perm(rng())};
        for (int64_t c : {int64_t{5}, int64_t{7}, int64_t{11}}) {
            if (std::gcd(c, q) == 1) gammas.push_back(ResidueBijection::mul_unit(c));
        }
        for (const ResidueBijection& g : gammas) {
            i128 tg = t_gamma(p, g);
            double vg = v_gamma(p, g);
            INFO("q = ", q, " g.describe() = ", g.describe());
            // Cauchy-Schwarz on the rearranged sum: T_gamma <= T, and the
            // deficit is bounded by twice the variance.
            REQUIRE(tg <= T);
            REQUIRE(static_cast<double>(T - tg) <= 2.0 * r.V + 1e-6 * std::max(1.0, r.V));
            REQUIRE(std::abs(vg) <= r.V + 1e-9 * std::max(1.0, r.V));
            // T - T_gamma = V - V_gamma: the main terms cancel.
            REQUIRE(static_cast<double>(T - tg) ==
                    doctest::Approx(r.V - vg).epsilon(1e-8).scale(std::max(1.0, r.V)));
        }
        // Pairing a with gamma(a) sums the same products as pairing gamma(a)
        // with a, so the two orientations of mul:c coincide.
        for (int64_t c : {int64_t{5}, int64_t{11}}) {
            if (std::gcd(c, q) != 1) continue;
            int64_t cinv = mod_inverse(c, q);
            CHECK(t_gamma(p, ResidueBijection::mul_unit(c)) ==
                  t_gamma(p, ResidueBijection::mul_unit(cinv)));
        }
    }
}

TEST_CASE("bijection parsing and materialization") {
    CHECK(ResidueBijection::parse("identity", 0).kind == ResidueBijection::Kind::Identity);
    CHECK(ResidueBijection::parse("inv", 0).kind == ResidueBijection::Kind::Inverse);
    CHECK(ResidueBijection::parse("mul:7", 0).param == 7);
    CHECK(ResidueBijection::parse("pow:3", 0).param == 3);
    CHECK(ResidueBijection::parse("random", 42).seed == 42);
    CHECK_THROWS_AS(ResidueBijection::parse("bogus", 0), std::invalid_argument);
    CHECK_THROWS_AS(ResidueBijection::parse("mul:", 0), std::invalid_argument);
    CHECK_THROWS_AS(ResidueBijection::parse("mul:3x", 0), std::invalid_argument);

    UnitGroup g12 = unit_group(12);
    // Squaring kills every unit mod 12 (all have order <= 2).
    CHECK_THROWS_AS(ResidueBijection::power(2).materialize(g12), std::domain_error);
    CHECK_THROWS_AS(ResidueBijection::mul_unit(4).materialize(g12), std::domain_error);

    // Random permutations are bijections and depend on the seed.
    UnitGroup g97 = unit_group(97);
    auto perm = ResidueBijection::random_perm(5).materialize(g97);
    std::vector<int32_t> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i) REQUIRE(sorted[i] == static_cast<int32_t>(i));
    CHECK(ResidueBijection::random_perm(5).materialize(g97) == perm);
    CHECK(ResidueBijection::random_perm(6).materialize(g97) != perm);
}

TEST_CASE("profile argument validation") {
    MobiusTable t = sieve_mobius(100);
    CHECK_THROWS_AS(profile(t, 0, 3), std::domain_error);
    CHECK_THROWS_AS(profile(t, 10, 0), std::domain_error);
    CHECK_THROWS_AS(profile(t, 101, 3), std::length_error);
    CHECK_THROWS_AS(profile(t, 20, 4).count_for(2), std::domain_error);
}
