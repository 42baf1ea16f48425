#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "sqf/characters.hpp"
#include "sqf/progressions.hpp"

using namespace sqf;

namespace {

// A fake table on which every n >= 1 is squarefree; over a full period the
// twisted sums of nonprincipal characters must vanish exactly.
MobiusTable uniform_table(int64_t limit) {
    MobiusTable t;
    t.limit = limit;
    t.mu_values.assign(static_cast<size_t>(limit) + 1, 1);
    t.mu_values[0] = 0;
    t.sf_bits.assign(static_cast<size_t>(limit / 64) + 1, 0);
    for (int64_t n = 1; n <= limit; ++n) {
        t.sf_bits[static_cast<size_t>(n >> 6)] |= uint64_t{1} << (n & 63);
    }
    return t;
}

}  // namespace

TEST_CASE("group structure at hand-checked moduli") {
    CharacterGroup g5 = build_group(5);
    CHECK(g5.phi == 4);
    CHECK(g5.lambda == 4);
    REQUIRE(g5.orders == std::vector<int64_t>{4});
    CHECK(g5.components[0].generator == 2);

    CharacterGroup g8 = build_group(8);
    CHECK(g8.phi == 4);
    CHECK(g8.lambda == 2);
    REQUIRE(g8.orders == std::vector<int64_t>{2, 2});
    CHECK(g8.components[0].generator == 7);  // -1 mod 8
    CHECK(g8.components[1].generator == 5);

    CharacterGroup g1 = build_group(1);
    CHECK(g1.phi == 1);
    CHECK(g1.lambda == 1);
    CHECK(g1.rank() == 0);
}

TEST_CASE("orders multiply to phi and generators reconstruct every unit") {
    for (int64_t q = 1; q <= 200; ++q) {
        CharacterGroup g = build_group(q);
        int64_t prod = 1;
        for (int64_t d : g.orders) prod *= d;
        CAPTURE(q);
        REQUIRE(prod == g.phi);
        REQUIRE(g.phi == euler_phi(q));
        for (size_t i = 0; i < g.units.elements.size(); ++i) {
            REQUIRE(g.reconstruct(i) == g.units.elements[i]);
        }
    }
}

TEST_CASE("there are phi distinct characters") {
    for (int64_t q : {int64_t{5}, int64_t{8}, int64_t{12}, int64_t{36}, int64_t{97}}) {
        CharacterGroup g = build_group(q);
        std::set<std::vector<int64_t>> tuples;
        for (int64_t i = 0; i < g.phi; ++i) tuples.insert(character_at(g, i).tuple);
        CAPTURE(q);
        CHECK(static_cast<int64_t>(tuples.size()) == g.phi);
        CHECK(character_at(g, 0).is_principal());
        CHECK_THROWS_AS(character_at(g, g.phi), std::out_of_range);
        CHECK_THROWS_AS(character_at(g, -1), std::out_of_range);
    }
}

TEST_CASE("characters are multiplicative at the angle level") {
    std::mt19937_64 rng(3);
    for (int64_t q : {int64_t{7}, int64_t{8}, int64_t{45}, int64_t{97}, int64_t{120}}) {
        CharacterGroup g = build_group(q);
        std::uniform_int_distribution<size_t> pick(0, g.units.elements.size() - 1);
        std::uniform_int_distribution<int64_t> pick_chi(0, g.phi - 1);
        for (int trial = 0; trial < 200; ++trial) {
            Character chi = character_at(g, pick_chi(rng));
            int64_t a = g.units.elements[pick(rng)];
            int64_t b = g.units.elements[pick(rng)];
            int64_t ab = static_cast<int64_t>((static_cast<i128>(a) * b) % q);
            INFO("q = ", q, " chi.index = ", chi.index, " a = ", a, " b = ", b);
            REQUIRE(chi.angle_of(ab) == (chi.angle_of(a) + chi.angle_of(b)) % g.lambda);
        }
    }
}

TEST_CASE("character values vanish off the units") {
    CharacterGroup g = build_group(12);
    Character chi = character_at(g, 1);
    CHECK(chi.value(4) == std::complex<double>{0.0, 0.0});
    CHECK(chi.value(6) == std::complex<double>{0.0, 0.0});
    CHECK(std::abs(chi.value(7)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("orthogonality defects stay at rounding level") {
    CHECK(orthogonality_selfcheck(build_group(8)) < 1e-12);
    CHECK(orthogonality_selfcheck(build_group(5)) < 1e-12);
    CHECK(orthogonality_selfcheck(build_group(7)) < 1e-10);
    CHECK(orthogonality_selfcheck(build_group(97)) < 1e-10);
    CHECK(orthogonality_selfcheck(build_group(144)) < 1e-10);
}

TEST_CASE("twisted sums at frozen anchors") {
    MobiusTable t = sieve_mobius(1000);
    CharacterGroup g3 = build_group(3);
    std::complex<double> z = twisted_sum(t, g3, character_at(g3, 1), 10);
    CHECK(z.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(z.imag() == doctest::Approx(0.0).epsilon(1e-12));
    // The principal character just counts squarefree n coprime to q.
    for (int64_t q : {int64_t{3}, int64_t{8}, int64_t{45}}) {
        CharacterGroup g = build_group(q);
        std::complex<double> p = twisted_sum(t, g, character_at(g, 0), 1000);
        CHECK(p.real() ==
              doctest::Approx(static_cast<double>(profile(t, 1000, q).total)).epsilon(1e-12));
        CHECK(p.imag() == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("nonprincipal sums vanish over full periods of a uniform table") {
    for (int64_t q : {int64_t{5}, int64_t{8}, int64_t{12}, int64_t{35}}) {
        MobiusTable t = uniform_table(q * 6);
        CharacterGroup g = build_group(q);
        for (int64_t i = 1; i < g.phi; ++i) {
            std::complex<double> z = twisted_sum(t, g, character_at(g, i), q * 6);
            INFO("q = ", q, " i = ", i);
            REQUIRE(std::abs(z) < 1e-12);
        }
        CHECK(character_variance(t, g, q * 6) < 1e-24);
    }
}

TEST_CASE("character variance at frozen anchors") {
    MobiusTable t = sieve_mobius(100);
    CHECK(character_variance(t, 3, 10) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(character_variance(t, 1, 10) == 0.0);
}

TEST_CASE("both evaluation modes agree exactly on the bucket counts") {
    MobiusTable t = sieve_mobius(5000);
    for (int64_t q : {int64_t{7}, int64_t{16}, int64_t{97}, int64_t{180}}) {
        CharacterGroup g = build_group(q);
        for (int64_t i = 0; i < std::min<int64_t>(g.phi, 12); ++i) {
            Character chi = character_at(g, i);
            std::complex<double> zb = twisted_sum(t, g, chi, 5000, CharEvalMode::Bucketed);
            std::complex<double> zd = twisted_sum(t, g, chi, 5000, CharEvalMode::Direct);
            INFO("q = ", q, " i = ", i);
            REQUIRE(zb.real() == zd.real());
            REQUIRE(zb.imag() == zd.imag());
        }
    }
}

TEST_CASE("spectral variance matches the centered residue variance") {
    MobiusTable t = sieve_mobius(100000);
    std::mt19937_64 rng(19);
    std::uniform_int_distribution<int64_t> pick_q(1, 200);
    std::uniform_int_distribution<int64_t> pick_x(1, 100000);
    for (int trial = 0; trial < 25; ++trial) {
        int64_t q = pick_q(rng);
        int64_t x = std::max<int64_t>(q, pick_x(rng));
        double spectral = character_variance(t, q, x);
        double centered = variance(profile(t, x, q)).centered_variance.to_double();
        INFO("x = ", x, " q = ", q);
        REQUIRE(spectral ==
                doctest::Approx(centered).epsilon(1e-6).scale(std::max(1.0, centered)));
    }
    // Pinned pair with both evaluation modes.
    for (CharEvalMode mode : {CharEvalMode::Bucketed, CharEvalMode::Direct}) {
        double spectral = character_variance(t, 97, 10000, mode);
        double centered = variance(profile(t, 10000, 97)).centered_variance.to_double();
        CHECK(spectral == doctest::Approx(centered).epsilon(1e-9));
    }
}

TEST_CASE("even moduli with a lone odd part are handled") {
    // q = 2 mod 4: the factor 2 contributes nothing to the group.
    CharacterGroup g = build_group(18);
    CHECK(g.phi == 6);
    REQUIRE(g.orders == std::vector<int64_t>{6});
    MobiusTable t = sieve_mobius(2000);
    double spectral = character_variance(t, g, 2000);
    double centered = variance(profile(t, 2000, 18)).centered_variance.to_double();
    CHECK(spectral == doctest::Approx(centered).epsilon(1e-9));
}
