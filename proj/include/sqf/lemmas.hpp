#pragma once

#include <array>
#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

#include "sqf/numeric.hpp"

namespace sqf {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// A primitive integer linear form w.u together with box half-widths U_i >= 1.
struct LinearFormInstance {
    std::array<int64_t, 3> w;
    std::array<double, 3> U;

    LinearFormInstance(std::array<int64_t, 3> w_in, std::array<double, 3> u_in);
};

// Exact number of primitive integer triples u with |u_i| <= U_i and w.u = 0.
// Solves for one coordinate instead of triple-looping; requires U_i <= 1000.
int64_t count_primitive_solutions(const LinearFormInstance& inst);

// 12*pi*U0*U1*U2 / max_i(|w_i|*U_i) + 4.
double lemma1_bound(const LinearFormInstance& inst);

// Exhaustive audit of count <= bound over every primitive |w_i| <= wmax and
// every integer box 1 <= U_i <= umax. Counts for all boxes of one form are
// derived from a single pass over the u-grid (prefix sums over |u_i|).
struct Lemma1Audit {
    int64_t instances = 0;
    int64_t violations = 0;
    double min_slack = 0.0;  // min over instances of bound - count
};
Lemma1Audit lemma1_exhaustive_check(int64_t wmax, int64_t umax);

// N, N* and M for the congruence a1*v1 = a2*v2 (mod q) over the integer box
// [1,V1] x [1,V2] restricted to v1, v2 coprime to q.
struct CongruenceCounts {
    double V1 = 1;
    double V2 = 1;
    int64_t q = 1;
    int64_t a1 = 1;
    int64_t a2 = 1;
    int64_t N = 0;        // exact pair count
    Rat128 N_star;        // (1/phi) * #{coprime pairs in box}; denominator | phi
    BigRational M;        // only meaningful when has_m
    bool has_m = false;
};

// Literal pair enumeration, O(V1*V2).
int64_t congruence_count_direct(double V1, double V2, int64_t q, int64_t a1, int64_t a2);
// Residue-bucketed: per-class counts of v2, matched against v1 = a1^{-1} a2 v2.
int64_t congruence_count_bucketed(double V1, double V2, int64_t q, int64_t a1, int64_t a2);

// Runs both methods, insists they agree exactly, and fills N_star (and M via
// m_quantity when with_m). Requires V1*V2 <= 1e8 and gcd(a1*a2, q) = 1.
CongruenceCounts congruence_count(double V1, double V2, int64_t q, int64_t a1, int64_t a2,
                                  bool with_m = true);

// M(q,a1,a2) = sum_{d|q} d * sum_{0<|r|,|s|<=q/2, a1*s+a2*r=0 (d)} 1/(|r||s|),
// exact. Accumulates integer multiples of 1/lcm(1..floor(q/2))^2 and reduces
// once at the end; cost O(q * tau(q)) big-integer operations. q <= 2000.
BigRational m_quantity(int64_t q, int64_t a1, int64_t a2);

// Same quantity by the literal double loop over (r, s) per divisor, exact
// rational accumulation. Slow oracle, q <= 500.
BigRational m_quantity_naive(int64_t q, int64_t a1, int64_t a2);

// Compensated floating-point version for large-q sweeps; absolute error well
// below 1e-9 for q <= 10^5.
double m_quantity_float(int64_t q, int64_t a1, int64_t a2);

// Dyadic average of M(q, f1^2, f2^2) over F_i < f_i <= 2F_i with f_1, f_2
// coprime to each other and to q, plus the envelope F1*F2 + q. Exact rational
// accumulation for q <= exact_q_cap, compensated floats beyond.
struct DyadicAverage {
    double sum = 0.0;
    double envelope = 0.0;
    int64_t terms = 0;
    bool exact = true;
};
DyadicAverage lemma3_average(int64_t q, double F1, double F2, int64_t exact_q_cap = 500);

}  // namespace sqf
