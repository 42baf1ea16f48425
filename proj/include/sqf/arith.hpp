#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sqf/numeric.hpp"

namespace sqf {

// Hard cap on in-memory sieve size: ~1.6 GB for mu bytes plus flag bits.
// The 1e8 ceiling is exercised by a dedicated test; see README.
inline constexpr int64_t kDefaultSieveCap = 1'500'000'000;

// Sieved Mobius values and squarefree flags for 1..limit. Immutable after
// construction; safe to share across threads.
struct MobiusTable {
    int64_t limit = 0;
    std::vector<int8_t> mu_values;     // index 0..limit, mu_values[0] = 0
    std::vector<uint64_t> sf_bits;     // bit n set iff n is squarefree

    int mu(int64_t n) const { return mu_values[static_cast<size_t>(n)]; }
    bool squarefree(int64_t n) const {
        return (sf_bits[static_cast<size_t>(n >> 6)] >> (n & 63)) & 1;
    }
    int64_t squarefree_count(int64_t upto) const;
};

MobiusTable sieve_mobius(int64_t limit, int64_t memory_cap = kDefaultSieveCap);

// Streams mu over [1, limit] in blocks without holding the full table.
// Each call receives the block start and the mu values for [lo, lo+len).
void for_each_mobius_block(int64_t limit, int64_t block_size,
                           const std::function<void(int64_t lo, std::span<const int8_t> mu)>& fn);

int64_t squarefree_count_segmented(int64_t limit, int64_t block_size = 1 << 20);

// Version-tagged binary dump (magic, version, encoding, limit, raw mu bytes).
void dump_mobius(const MobiusTable& table, const std::string& path);
MobiusTable load_mobius(const std::string& path);

std::vector<std::pair<int64_t, int>> factorize(int64_t n);

int64_t euler_phi(int64_t q);

// c_q = prod_{p not dividing q} (1 - p^-2) = (6/pi^2) * prod_{p | q} (1 - p^-2)^-1.
// Closed form through zeta(2); relative error < 1e-12 (finite product over
// the prime divisors of q, pi at full double precision).
double c_constant(int64_t q);

struct UnitGroup {
    int64_t modulus = 1;
    std::vector<int64_t> elements;   // ascending; {1} for q = 1
    int64_t phi = 0;
    std::vector<int32_t> index_of;   // size q: residue -> element index, -1 if not a unit

    int32_t index(int64_t residue) const { return index_of[static_cast<size_t>(residue)]; }
};

UnitGroup unit_group(int64_t q);

}  // namespace sqf
