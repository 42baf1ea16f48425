#include "sqf/characters.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "sqf/numeric.hpp"

namespace sqf {

namespace {

// Smallest g coprime to part whose multiplicative order mod part is exactly
// target_order. Checked directly against the prime divisors of target_order,
// so it works uniformly for p^e without lifting arguments.
int64_t smallest_generator(int64_t part, int64_t target_order) {
    std::vector<int64_t> prime_divs;
    for (auto [p, e] : factorize(target_order)) prime_divs.push_back(p);
    for (int64_t g = 2; g < part; ++g) {
        if (std::gcd(g, part) != 1) continue;
        bool full = true;
        for (int64_t r : prime_divs) {
            if (mod_pow(g, target_order / r, part) == 1) {
                full = false;
                break;
            }
        }
        if (full) return g;
    }
    throw std::logic_error("no generator found for part " + std::to_string(part));
}

// dlog table for <g> of the given order over residues mod part (-1 elsewhere).
std::vector<int32_t> walk_dlog(int64_t part, int64_t g, int64_t order) {
    std::vector<int32_t> dlog(static_cast<size_t>(part), -1);
    int64_t v = 1;
    for (int64_t k = 0; k < order; ++k) {
        dlog[static_cast<size_t>(v)] = static_cast<int32_t>(k);
        v = static_cast<int64_t>(static_cast<i128>(v) * g % part);
    }
    return dlog;
}

// CRT lift: the residue mod q that is g mod part and 1 mod q/part.
int64_t lift_generator(int64_t g, int64_t part, int64_t q) {
    int64_t rest = q / part;
    if (rest == 1) return mod_floor(g, q);
    int64_t inv = mod_inverse(mod_floor(part, rest), rest);
    int64_t t = static_cast<int64_t>(static_cast<i128>(mod_floor(1 - g, rest)) * inv % rest);
    return static_cast<int64_t>((static_cast<i128>(part) * t + g) % q);
}

// Squarefree counts per residue class mod q for n <= x, one sieve pass.
std::vector<int64_t> residue_counts(const MobiusTable& table, int64_t x, int64_t q) {
    std::vector<int64_t> counts(static_cast<size_t>(q), 0);
    int64_t r = mod_floor(1, q);
    for (int64_t n = 1; n <= x; ++n) {
        if (table.squarefree(n)) ++counts[static_cast<size_t>(r)];
        if (++r == q) r = 0;
    }
    return counts;
}

}  // namespace

int64_t CharacterGroup::reconstruct(size_t unit_index) const {
    if (q == 1) return 1;
    i128 prod = 1;
    for (size_t i = 0; i < components.size(); ++i) {
        prod = prod * mod_pow(components[i].generator_modq, log_of(unit_index, i), q) % q;
    }
    return static_cast<int64_t>(prod);
}

CharacterGroup build_group(int64_t q) {
    if (q < 1) throw std::invalid_argument("modulus must be >= 1");
    CharacterGroup g;
    g.q = q;
    g.units = unit_group(q);
    g.phi = g.units.phi;

    for (auto [p, e] : factorize(q)) {
        int64_t part = 1;
        for (int k = 0; k < e; ++k) part *= p;
        if (p == 2) {
            if (e == 1) continue;  // phi(2) = 1, trivial factor
            if (e == 2) {
                GroupComponent c;
                c.part = 4;
                c.order = 2;
                c.generator = 3;
                c.generator_modq = lift_generator(3, 4, q);
                c.dlog = walk_dlog(4, 3, 2);
                g.components.push_back(std::move(c));
                continue;
            }
            // 2^e with e >= 3: (Z/2^e)^x = <-1> x <5>.
            int64_t five_order = part / 4;
            GroupComponent sign, five;
            sign.part = five.part = part;
            sign.order = 2;
            sign.generator = part - 1;
            sign.generator_modq = lift_generator(part - 1, part, q);
            five.order = five_order;
            five.generator = 5;
            five.generator_modq = lift_generator(5, part, q);
            sign.dlog.assign(static_cast<size_t>(part), -1);
            five.dlog.assign(static_cast<size_t>(part), -1);
            for (int64_t s = 0; s < 2; ++s) {
                int64_t v = s == 0 ? 1 : part - 1;
                for (int64_t t = 0; t < five_order; ++t) {
                    sign.dlog[static_cast<size_t>(v)] = static_cast<int32_t>(s);
                    five.dlog[static_cast<size_t>(v)] = static_cast<int32_t>(t);
                    v = static_cast<int64_t>(static_cast<i128>(v) * 5 % part);
                }
            }
            g.components.push_back(std::move(sign));
            g.components.push_back(std::move(five));
            continue;
        }
        GroupComponent c;
        c.part = part;
        c.order = part / p * (p - 1);  // phi(p^e)
        c.generator = smallest_generator(part, c.order);
        c.generator_modq = lift_generator(c.generator, part, q);
        c.dlog = walk_dlog(part, c.generator, c.order);
        g.components.push_back(std::move(c));
    }

    g.lambda = 1;
    int64_t order_product = 1;
    for (const auto& c : g.components) {
        g.orders.push_back(c.order);
        g.lambda = std::lcm(g.lambda, c.order);
        order_product *= c.order;
    }
    for (int64_t d : g.orders) g.weights.push_back(g.lambda / d);
    if (order_product != g.phi) {
        throw std::logic_error("component orders do not multiply to phi(q)");
    }

    g.logs.assign(g.units.elements.size() * g.rank(), 0);
    for (size_t u = 0; u < g.units.elements.size(); ++u) {
        int64_t a = g.units.elements[u];
        for (size_t i = 0; i < g.rank(); ++i) {
            int32_t e = g.components[i].dlog[static_cast<size_t>(a % g.components[i].part)];
            if (e < 0) throw std::logic_error("unit missing from dlog table");
            g.logs[u * g.rank() + i] = e;
        }
    }
    return g;
}

Character character_at(const CharacterGroup& group, int64_t index) {
    if (index < 0 || index >= group.phi) {
        throw std::out_of_range("character index out of range");
    }
    Character chi;
    chi.group = &group;
    chi.index = index;
    chi.tuple.resize(group.rank());
    int64_t rest = index;
    for (size_t i = 0; i < group.rank(); ++i) {
        chi.tuple[i] = rest % group.orders[i];
        rest /= group.orders[i];
    }
    return chi;
}

int64_t Character::angle_of_unit(size_t unit_index) const {
    const CharacterGroup& g = *group;
    int64_t angle = 0;
    for (size_t i = 0; i < g.rank(); ++i) {
        int64_t twist = static_cast<int64_t>(
            static_cast<i128>(tuple[i]) * g.log_of(unit_index, i) % g.orders[i]);
        angle = (angle + twist * g.weights[i]) % g.lambda;
    }
    return angle;
}

int64_t Character::angle_of(int64_t a) const {
    return angle_of_unit(static_cast<size_t>(group->units.index(a)));
}

std::complex<double> Character::value(int64_t a) const {
    int64_t r = mod_floor(a, group->q);
    if (group->q > 1 && std::gcd(r, group->q) != 1) return {0.0, 0.0};
    double theta = 2.0 * std::numbers::pi * static_cast<double>(angle_of(a)) /
                   static_cast<double>(group->lambda);
    return {std::cos(theta), std::sin(theta)};
}

std::complex<double> twisted_sum(const MobiusTable& table, const CharacterGroup& group,
                                 const Character& chi, int64_t x, CharEvalMode mode) {
    if (x < 1) throw std::invalid_argument("x must be >= 1");
    if (x > table.limit) throw std::length_error("x exceeds sieve limit");
    const int64_t q = group.q;
    const int64_t lambda = group.lambda;
    // chi takes values in the lambda-th roots of unity; tally exact integer
    // multiplicities per root and touch floating point only at the end.
    std::vector<int64_t> bucket(static_cast<size_t>(lambda), 0);

    if (mode == CharEvalMode::Bucketed) {
        std::vector<int64_t> counts = residue_counts(table, x, q);
        for (size_t u = 0; u < group.units.elements.size(); ++u) {
            int64_t r = group.units.elements[u] % q;  // q = 1 stores the unit as 1
            bucket[static_cast<size_t>(chi.angle_of_unit(u))] += counts[static_cast<size_t>(r)];
        }
    } else {
        // Angle per residue class, -1 marking the classes chi kills.
        std::vector<int64_t> angle(static_cast<size_t>(q), -1);
        for (size_t u = 0; u < group.units.elements.size(); ++u) {
            angle[static_cast<size_t>(group.units.elements[u] % q)] = chi.angle_of_unit(u);
        }
        int64_t r = mod_floor(1, q);
        for (int64_t n = 1; n <= x; ++n) {
            if (table.squarefree(n) && angle[static_cast<size_t>(r)] >= 0) {
                ++bucket[static_cast<size_t>(angle[static_cast<size_t>(r)])];
            }
            if (++r == q) r = 0;
        }
    }

    CompensatedSum re, im;
    for (int64_t t = 0; t < lambda; ++t) {
        if (bucket[static_cast<size_t>(t)] == 0) continue;
        double theta = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(lambda);
        double m = static_cast<double>(bucket[static_cast<size_t>(t)]);
        re.add(m * std::cos(theta));
        im.add(m * std::sin(theta));
    }
    return {re.value(), im.value()};
}

double character_variance(const MobiusTable& table, const CharacterGroup& group, int64_t x,
                          CharEvalMode mode) {
    CompensatedSum acc;
    for (int64_t idx = 1; idx < group.phi; ++idx) {
        Character chi = character_at(group, idx);
        std::complex<double> z = twisted_sum(table, group, chi, x, mode);
        acc.add(z.real() * z.real() + z.imag() * z.imag());
    }
    return acc.value() / static_cast<double>(group.phi);
}

double character_variance(const MobiusTable& table, int64_t q, int64_t x, CharEvalMode mode) {
    CharacterGroup group = build_group(q);
    return character_variance(table, group, x, mode);
}

double orthogonality_selfcheck(const CharacterGroup& group, int max_pair_samples, uint64_t seed) {
    const size_t nunits = group.units.elements.size();
    double worst = 0.0;

    // Column sums: sum over units of chi(u) is phi for the principal character
    // and 0 otherwise.
    for (int64_t idx = 0; idx < group.phi; ++idx) {
        Character chi = character_at(group, idx);
        CompensatedSum re, im;
        for (size_t u = 0; u < nunits; ++u) {
            double theta = 2.0 * std::numbers::pi * static_cast<double>(chi.angle_of_unit(u)) /
                           static_cast<double>(group.lambda);
            re.add(std::cos(theta));
            im.add(std::sin(theta));
        }
        double expected = idx == 0 ? static_cast<double>(group.phi) : 0.0;
        worst = std::max(worst, std::hypot(re.value() - expected, im.value()));
    }

    // Row sums on sampled unit pairs: sum over chi of chi(a) conj(chi(b)) is
    // phi when a = b and 0 otherwise.
    std::mt19937_64 rng(seed);
    int samples = std::min<int64_t>(max_pair_samples, static_cast<int64_t>(nunits) * nunits);
    for (int s = 0; s < samples; ++s) {
        size_t ua = static_cast<size_t>(rng() % nunits);
        size_t ub = static_cast<size_t>(rng() % nunits);
        CompensatedSum re, im;
        for (int64_t idx = 0; idx < group.phi; ++idx) {
            Character chi = character_at(group, idx);
            int64_t diff = mod_floor(chi.angle_of_unit(ua) - chi.angle_of_unit(ub), group.lambda);
            double theta = 2.0 * std::numbers::pi * static_cast<double>(diff) /
                           static_cast<double>(group.lambda);
            re.add(std::cos(theta));
            im.add(std::sin(theta));
        }
        double expected = ua == ub ? static_cast<double>(group.phi) : 0.0;
        worst = std::max(worst, std::hypot(re.value() - expected, im.value()));
    }
    return worst;
}

}  // namespace sqf
