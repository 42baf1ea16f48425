#include "sqf/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace sqf {

namespace {

std::vector<uint64_t> composite_bits(int64_t limit) {
    std::vector<uint64_t> comp((limit >> 6) + 1, 0);
    auto set = [&](int64_t n) { comp[n >> 6] |= uint64_t{1} << (n & 63); };
    auto get = [&](int64_t n) { return (comp[n >> 6] >> (n & 63)) & 1; };
    for (int64_t i = 2; i * i <= limit; ++i) {
        if (get(i)) continue;
        for (int64_t j = i * i; j <= limit; j += i) set(j);
    }
    return comp;
}

std::vector<int64_t> primes_up_to(int64_t limit) {
    std::vector<int64_t> primes;
    if (limit < 2) return primes;
    auto comp = composite_bits(limit);
    for (int64_t n = 2; n <= limit; ++n)
        if (!((comp[n >> 6] >> (n & 63)) & 1)) primes.push_back(n);
    return primes;
}

constexpr char kDumpMagic[8] = {'S', 'Q', 'F', 'M', 'O', 'B', 'T', '\0'};
constexpr uint32_t kDumpVersion = 1;
constexpr uint8_t kDumpEncodingRawMu = 1;

}  // namespace

int64_t MobiusTable::squarefree_count(int64_t upto) const {
    if (upto > limit) throw std::length_error("squarefree_count: upto exceeds table limit");
    int64_t count = 0;
    for (int64_t n = 1; n <= upto; ++n) count += squarefree(n);
    return count;
}

MobiusTable sieve_mobius(int64_t limit, int64_t memory_cap) {
    if (limit < 1) throw std::domain_error("sieve_mobius: limit must be >= 1");
    if (limit > memory_cap)
        throw std::length_error("sieve_mobius: limit " + std::to_string(limit) +
                                " exceeds memory cap " + std::to_string(memory_cap));

    MobiusTable t;
    t.limit = limit;
    t.mu_values.assign(static_cast<size_t>(limit) + 1, 1);
    t.mu_values[0] = 0;

    // One sign flip per distinct prime divisor, zero on square multiples.
    auto comp = composite_bits(limit);
    for (int64_t p = 2; p <= limit; ++p) {
        if ((comp[p >> 6] >> (p & 63)) & 1) continue;
        for (int64_t m = p; m <= limit; m += p) t.mu_values[m] = -t.mu_values[m];
        if (p <= limit / p)
            for (int64_t m = p * p; m <= limit; m += p * p) t.mu_values[m] = 0;
    }

    t.sf_bits.assign((static_cast<size_t>(limit) >> 6) + 1, 0);
    for (int64_t n = 1; n <= limit; ++n)
        if (t.mu_values[n] != 0) t.sf_bits[n >> 6] |= uint64_t{1} << (n & 63);
    return t;
}

void for_each_mobius_block(int64_t limit, int64_t block_size,
                           const std::function<void(int64_t, std::span<const int8_t>)>& fn) {
    if (limit < 1) throw std::domain_error("for_each_mobius_block: limit must be >= 1");
    if (block_size < 1) throw std::domain_error("for_each_mobius_block: block_size must be >= 1");

    int64_t root = static_cast<int64_t>(std::sqrt(static_cast<double>(limit)));
    while ((root + 1) * (root + 1) <= limit) ++root;
    auto primes = primes_up_to(root);

    std::vector<int8_t> mu;
    std::vector<int64_t> rem;
    for (int64_t lo = 1; lo <= limit; lo += block_size) {
        int64_t hi = std::min(limit, lo + block_size - 1);
        int64_t len = hi - lo + 1;
        mu.assign(static_cast<size_t>(len), 1);
        rem.resize(static_cast<size_t>(len));
        for (int64_t i = 0; i < len; ++i) rem[i] = lo + i;

        for (int64_t p : primes) {
            int64_t start = ((lo + p - 1) / p) * p;
            for (int64_t m = start; m <= hi; m += p) {
                mu[m - lo] = -mu[m - lo];
                rem[m - lo] /= p;
            }
            int64_t p2 = p * p;
            if (p2 > hi) continue;
            int64_t start2 = ((lo + p2 - 1) / p2) * p2;
            for (int64_t m = start2; m <= hi; m += p2) mu[m - lo] = 0;
        }
        // Whatever is left is a single prime > sqrt(limit).
        for (int64_t i = 0; i < len; ++i)
            if (rem[i] > 1) mu[i] = -mu[i];
        if (lo == 1) mu[0] = 1;  // n = 1

        fn(lo, std::span<const int8_t>(mu.data(), static_cast<size_t>(len)));
    }
}

int64_t squarefree_count_segmented(int64_t limit, int64_t block_size) {
    int64_t count = 0;
    for_each_mobius_block(limit, block_size, [&](int64_t, std::span<const int8_t> mu) {
        for (int8_t v : mu) count += v != 0;
    });
    return count;
}

void dump_mobius(const MobiusTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("dump_mobius: cannot open " + path);
    out.write(kDumpMagic, sizeof(kDumpMagic));
    uint32_t version = kDumpVersion;
    uint8_t encoding = kDumpEncodingRawMu;
    uint64_t limit = static_cast<uint64_t>(table.limit);
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&encoding), sizeof(encoding));
    out.write(reinterpret_cast<const char*>(&limit), sizeof(limit));
    out.write(reinterpret_cast<const char*>(table.mu_values.data()),
              static_cast<std::streamsize>(table.mu_values.size()));
    if (!out) throw std::runtime_error("dump_mobius: write failed for " + path);
}

MobiusTable load_mobius(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_mobius: cannot open " + path);
    char magic[8];
    uint32_t version = 0;
    uint8_t encoding = 0;
    uint64_t limit = 0;
    in.read(magic, sizeof(magic));
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    in.read(reinterpret_cast<char*>(&encoding), sizeof(encoding));
    in.read(reinterpret_cast<char*>(&limit), sizeof(limit));
    if (!in || std::memcmp(magic, kDumpMagic, sizeof(magic)) != 0)
        throw std::runtime_error("load_mobius: bad magic in " + path);
    if (version != kDumpVersion)
        throw std::runtime_error("load_mobius: unsupported version in " + path);
    if (encoding != kDumpEncodingRawMu)
        throw std::runtime_error("load_mobius: unsupported encoding in " + path);

    MobiusTable t;
    t.limit = static_cast<int64_t>(limit);
    t.mu_values.resize(limit + 1);
    in.read(reinterpret_cast<char*>(t.mu_values.data()),
            static_cast<std::streamsize>(t.mu_values.size()));
    if (!in) throw std::runtime_error("load_mobius: truncated payload in " + path);
    t.sf_bits.assign((limit >> 6) + 1, 0);
    for (uint64_t n = 1; n <= limit; ++n)
        if (t.mu_values[n] != 0) t.sf_bits[n >> 6] |= uint64_t{1} << (n & 63);
    return t;
}

std::vector<std::pair<int64_t, int>> factorize(int64_t n) {
    if (n < 1) throw std::domain_error("factorize: argument must be >= 1");
    std::vector<std::pair<int64_t, int>> factors;
    for (int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p != 0) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        factors.emplace_back(p, e);
    }
    if (n > 1) factors.emplace_back(n, 1);
    return factors;
}

int64_t euler_phi(int64_t q) {
    if (q < 1) throw std::domain_error("euler_phi: argument must be >= 1");
    int64_t phi = 1;
    for (auto [p, e] : factorize(q)) {
        phi *= p - 1;
        for (int i = 1; i < e; ++i) phi *= p;
    }
    return phi;
}

double c_constant(int64_t q) {
    if (q < 1) throw std::domain_error("c_constant: argument must be >= 1");
    double c = 6.0 / (std::numbers::pi * std::numbers::pi);
    for (auto [p, e] : factorize(q)) {
        (void)e;
        double pd = static_cast<double>(p);
        c /= 1.0 - 1.0 / (pd * pd);
    }
    return c;
}

UnitGroup unit_group(int64_t q) {
    if (q < 1) throw std::domain_error("unit_group: modulus must be >= 1");
    UnitGroup g;
    g.modulus = q;
    if (q == 1) {
        g.elements = {1};
        g.phi = 1;
        g.index_of.assign(1, 0);  // every integer lies in the unique class
        return g;
    }
    g.index_of.assign(static_cast<size_t>(q), -1);
    for (int64_t a = 1; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        g.index_of[a] = static_cast<int32_t>(g.elements.size());
        g.elements.push_back(a);
    }
    g.phi = static_cast<int64_t>(g.elements.size());
    return g;
}

}  // namespace sqf
