#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "sqf/arith.hpp"

namespace sqf {

// One cyclic factor of (Z/qZ)^x: a prime-power part of q together with a
// generator and its discrete-log table over that part.
struct GroupComponent {
    int64_t part = 1;          // p^e (or 2^k)
    int64_t order = 1;         // cyclic order d_i
    int64_t generator = 1;     // generator modulo part
    int64_t generator_modq = 1;  // CRT lift: generator mod part, 1 elsewhere
    std::vector<int32_t> dlog;   // residue mod part -> exponent, -1 if not a unit
};

// Structure of (Z/qZ)^x as a product of cyclic groups, with discrete logs for
// every unit. Character values are exact fractions of a full turn with
// denominator lambda = lcm of the component orders.
struct CharacterGroup {
    int64_t q = 1;
    int64_t phi = 1;
    int64_t lambda = 1;
    UnitGroup units;
    std::vector<GroupComponent> components;
    std::vector<int64_t> orders;       // d_i, product = phi
    std::vector<int64_t> weights;      // lambda / d_i
    std::vector<int32_t> logs;         // flattened phi x r exponent tuples

    size_t rank() const { return orders.size(); }
    int32_t log_of(size_t unit_index, size_t component) const {
        return logs[unit_index * rank() + component];
    }
    // Rebuilds a unit from its exponent tuple via the lifted generators.
    int64_t reconstruct(size_t unit_index) const;
};

// Deterministic construction: smallest primitive root per odd prime power,
// {-1, 5} for 2^k with k >= 3. Needs O(q) memory for the dlog tables.
CharacterGroup build_group(int64_t q);

// A Dirichlet character given by its exponent tuple. angle_of returns the
// numerator of the angle over lambda; values on non-units are 0 by convention.
struct Character {
    const CharacterGroup* group = nullptr;
    int64_t index = 0;                 // mixed-radix rank, 0 = principal
    std::vector<int64_t> tuple;        // c_i with 0 <= c_i < d_i

    bool is_principal() const { return index == 0; }
    int64_t angle_of_unit(size_t unit_index) const;
    int64_t angle_of(int64_t a) const;            // a must be a unit mod q
    std::complex<double> value(int64_t a) const;  // 0 when gcd(a,q) > 1
};

Character character_at(const CharacterGroup& group, int64_t index);

enum class CharEvalMode {
    Bucketed,  // per-residue counts first, then one character evaluation per class
    Direct,    // one pass over n <= x per character; never forms residue counts
};

// Sum over squarefree n <= x coprime to q of chi(n), accumulated as exact
// integer counts per root of unity and converted to complex once at the end.
std::complex<double> twisted_sum(const MobiusTable& table, const CharacterGroup& group,
                                 const Character& chi, int64_t x,
                                 CharEvalMode mode = CharEvalMode::Bucketed);

// (1/phi) sum over chi != chi0 of |twisted_sum(chi)|^2.
double character_variance(const MobiusTable& table, const CharacterGroup& group, int64_t x,
                          CharEvalMode mode = CharEvalMode::Bucketed);
double character_variance(const MobiusTable& table, int64_t q, int64_t x,
                          CharEvalMode mode = CharEvalMode::Bucketed);

// Max defect over column sums (sum of chi over units) and sampled pair sums
// (sum over chi of chi(a) conj(chi(b)) vs phi [a=b]).
double orthogonality_selfcheck(const CharacterGroup& group, int max_pair_samples = 200,
                               uint64_t seed = 1);

}  // namespace sqf
