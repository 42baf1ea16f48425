#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqf/arith.hpp"
#include "sqf/numeric.hpp"

namespace sqf {

// Per-residue squarefree counts S(x;q,a) for the unit classes a mod q.
struct ProgressionProfile {
    int64_t x = 0;
    int64_t q = 1;
    UnitGroup units;
    std::vector<int64_t> counts;  // aligned with units.elements
    int64_t total = 0;            // sum over unit classes
    double cq = 0.0;

    int64_t count_for(int64_t a) const;
    double expected_per_class() const { return cq * static_cast<double>(x) / static_cast<double>(q); }
};

ProgressionProfile profile(const MobiusTable& table, int64_t x, int64_t q);

// E(x;q,a) = S(x;q,a) - c_q x/q.
double error_term(const ProgressionProfile& p, int64_t a);

struct VarianceReport {
    int64_t x = 0;
    int64_t q = 1;
    int64_t phi = 1;
    double V = 0.0;             // sum of E^2 over unit classes, compensated
    Rat128 centered_variance;   // (phi*T - total^2)/phi, exact
    i128 T = 0;                 // sum of S_a^2, exact
    double main_term_T = 0.0;   // total^2/phi
    double residual = 0.0;      // T - total^2/phi
};

VarianceReport variance(const ProgressionProfile& p);

// Independent route to T(x;q): opens |mu(n)| as sum of mu(e) over e^2 | n and
// enumerates pairs (d, e) with d e^2 <= x, gcd(de, q) = 1, bucketing d e^2 by
// residue class. Never reads the squarefree flags.
i128 t_via_convolution(const MobiusTable& table, int64_t x, int64_t q);

// A bijection of the unit classes mod q. Materialized against a concrete
// UnitGroup; construction of the permutation verifies bijectivity.
struct ResidueBijection {
    enum class Kind { Identity, MulUnit, Inverse, Power, RandomPerm };

    Kind kind = Kind::Identity;
    int64_t param = 0;   // c for MulUnit, k for Power
    uint64_t seed = 0;   // RandomPerm; Fisher-Yates over mt19937_64(seed)

    static ResidueBijection identity() { return {}; }
    static ResidueBijection mul_unit(int64_t c) { return {Kind::MulUnit, c, 0}; }
    static ResidueBijection inverse() { return {Kind::Inverse, 0, 0}; }
    static ResidueBijection power(int64_t k) { return {Kind::Power, k, 0}; }
    static ResidueBijection random_perm(uint64_t seed) { return {Kind::RandomPerm, 0, seed}; }

    // Accepts "identity", "inv", "mul:c", "pow:k", "random".
    static ResidueBijection parse(const std::string& spec, uint64_t seed);

    std::string describe() const;

    // Element-index permutation: image[i] is the index of gamma(elements[i]).
    // Throws std::domain_error if the induced map is not a bijection.
    std::vector<int32_t> materialize(const UnitGroup& g) const;
};

// T_gamma = sum over unit classes a of S(x;q,gamma(a)) * S(x;q,a).
i128 t_gamma(const ProgressionProfile& p, const ResidueBijection& g);

// V_gamma = sum over unit classes a of E(x;q,gamma(a)) * E(x;q,a).
double v_gamma(const ProgressionProfile& p, const ResidueBijection& g);

// Evaluates both closed forms tying V to T and returns the larger absolute
// defect:  V = T - 2 c_q (x/q) total + phi c_q^2 x^2/q^2
//          V = T - total^2/phi + (total - phi c_q x/q)^2/phi.
double equivalence_check(const ProgressionProfile& p);

}  // namespace sqf
