#include "sqf/progressions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sqf {

int64_t ProgressionProfile::count_for(int64_t a) const {
    int64_t r = mod_floor(a, q);
    if (q == 1) return counts[0];
    int32_t idx = units.index(r);
    if (idx < 0)
        throw std::domain_error("count_for: residue " + std::to_string(a) +
                                " is not a unit mod " + std::to_string(q));
    return counts[idx];
}

ProgressionProfile profile(const MobiusTable& table, int64_t x, int64_t q) {
    if (x < 1) throw std::domain_error("profile: x must be >= 1");
    if (q < 1) throw std::domain_error("profile: q must be >= 1");
    if (x > table.limit)
        throw std::length_error("profile: x exceeds table limit " + std::to_string(table.limit));

    ProgressionProfile p;
    p.x = x;
    p.q = q;
    p.units = unit_group(q);
    p.counts.assign(static_cast<size_t>(p.units.phi), 0);
    p.cq = c_constant(q);

    int64_t r = 1 % q;
    for (int64_t n = 1; n <= x; ++n) {
        if (table.squarefree(n)) {
            int32_t idx = p.units.index_of[r];
            if (idx >= 0) ++p.counts[idx];
        }
        if (++r == q) r = 0;
    }
    p.total = std::accumulate(p.counts.begin(), p.counts.end(), int64_t{0});
    return p;
}

double error_term(const ProgressionProfile& p, int64_t a) {
    return static_cast<double>(p.count_for(a)) - p.expected_per_class();
}

VarianceReport variance(const ProgressionProfile& p) {
    VarianceReport r;
    r.x = p.x;
    r.q = p.q;
    r.phi = p.units.phi;

    i128 T = 0;
    for (int64_t s : p.counts) T += static_cast<i128>(s) * s;
    r.T = T;

    double expected = p.expected_per_class();
    CompensatedSum v;
    for (int64_t s : p.counts) {
        double e = static_cast<double>(s) - expected;
        v.add(e * e);
    }
    r.V = v.value();

    i128 total = p.total;
    r.centered_variance = Rat128(static_cast<i128>(r.phi) * T - total * total, r.phi);
    r.main_term_T = static_cast<double>(p.total) * static_cast<double>(p.total) /
                    static_cast<double>(r.phi);
    r.residual = r.centered_variance.to_double();
    return r;
}

i128 t_via_convolution(const MobiusTable& table, int64_t x, int64_t q) {
    if (x < 1) throw std::domain_error("t_via_convolution: x must be >= 1");
    if (q < 1) throw std::domain_error("t_via_convolution: q must be >= 1");
    if (x > table.limit)
        throw std::length_error("t_via_convolution: x exceeds table limit " +
                                std::to_string(table.limit));

    std::vector<char> unit(static_cast<size_t>(q), 0);
    for (int64_t r = 0; r < q; ++r) unit[r] = std::gcd(r, q) == 1;
    if (q == 1) unit[0] = 1;

    std::vector<int64_t> weight(static_cast<size_t>(q), 0);
    for (int64_t e = 1; e * e <= x; ++e) {
        int m = table.mu(e);
        if (m == 0 || std::gcd(e, q) != 1) continue;
        int64_t e2 = e * e;
        int64_t dmax = x / e2;
        int64_t e2r = e2 % q;
        int64_t dr = 1 % q;   // d mod q
        int64_t mr = e2r;     // d*e^2 mod q
        for (int64_t d = 1; d <= dmax; ++d) {
            if (unit[dr]) weight[mr] += m;
            if (++dr == q) dr = 0;
            mr += e2r;
            if (mr >= q) mr -= q;
        }
    }

    i128 T = 0;
    for (int64_t w : weight) T += static_cast<i128>(w) * w;
    return T;
}

ResidueBijection ResidueBijection::parse(const std::string& spec, uint64_t seed) {
    if (spec == "identity") return identity();
    if (spec == "inv") return inverse();
    if (spec == "random") return random_perm(seed);
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        std::string head = spec.substr(0, colon);
        std::string tail = spec.substr(colon + 1);
        try {
            size_t used = 0;
            int64_t value = std::stoll(tail, &used);
            if (used == tail.size()) {
                if (head == "mul") return mul_unit(value);
                if (head == "pow") return power(value);
            }
        } catch (const std::exception&) {
            // fall through to the error below
        }
    }
    throw std::invalid_argument("bad gamma spec '" + spec +
                                "' (want identity|mul:c|inv|pow:k|random)");
}

std::string ResidueBijection::describe() const {
    switch (kind) {
        case Kind::Identity: return "identity";
        case Kind::MulUnit: return "mul:" + std::to_string(param);
        case Kind::Inverse: return "inv";
        case Kind::Power: return "pow:" + std::to_string(param);
        case Kind::RandomPerm: return "random(seed=" + std::to_string(seed) + ")";
    }
    return "?";
}

std::vector<int32_t> ResidueBijection::materialize(const UnitGroup& g) const {
    size_t n = g.elements.size();
    std::vector<int32_t> image(n);

    auto index_of_residue = [&](int64_t r) {
        int32_t idx = g.modulus == 1 ? 0 : g.index_of[static_cast<size_t>(r)];
        if (idx < 0)
            throw std::domain_error("gamma image " + std::to_string(r) + " is not a unit mod " +
                                    std::to_string(g.modulus));
        return idx;
    };

    switch (kind) {
        case Kind::Identity:
            for (size_t i = 0; i < n; ++i) image[i] = static_cast<int32_t>(i);
            break;
        case Kind::MulUnit: {
            int64_t c = mod_floor(param, g.modulus);
            for (size_t i = 0; i < n; ++i)
                image[i] = index_of_residue(c * g.elements[i] % g.modulus);
            break;
        }
        case Kind::Inverse:
            for (size_t i = 0; i < n; ++i)
                image[i] = index_of_residue(mod_inverse(g.elements[i], g.modulus));
            break;
        case Kind::Power: {
            if (param < 0) throw std::domain_error("pow:k needs k >= 0");
            for (size_t i = 0; i < n; ++i)
                image[i] = index_of_residue(
                    mod_pow(g.elements[i], static_cast<uint64_t>(param), g.modulus));
            break;
        }
        case Kind::RandomPerm: {
            // rng() % m keeps the draw identical across platforms; the tiny
            // modulo bias is irrelevant for a test permutation.
            std::mt19937_64 rng(seed);
            for (size_t i = 0; i < n; ++i) image[i] = static_cast<int32_t>(i);
            for (size_t i = n; i > 1; --i) {
                size_t j = static_cast<size_t>(rng() % i);
                std::swap(image[i - 1], image[j]);
            }
            break;
        }
    }

    std::vector<char> seen(n, 0);
    for (int32_t v : image) {
        if (seen[static_cast<size_t>(v)])
            throw std::domain_error("gamma '" + describe() + "' is not a bijection mod " +
                                    std::to_string(g.modulus));
        seen[static_cast<size_t>(v)] = 1;
    }
    return image;
}

i128 t_gamma(const ProgressionProfile& p, const ResidueBijection& g) {
    auto image = g.materialize(p.units);
    i128 sum = 0;
    for (size_t i = 0; i < image.size(); ++i)
        sum += static_cast<i128>(p.counts[static_cast<size_t>(image[i])]) * p.counts[i];
    return sum;
}

double v_gamma(const ProgressionProfile& p, const ResidueBijection& g) {
    auto image = g.materialize(p.units);
    double expected = p.expected_per_class();
    CompensatedSum sum;
    for (size_t i = 0; i < image.size(); ++i) {
        double ei = static_cast<double>(p.counts[i]) - expected;
        double eg = static_cast<double>(p.counts[static_cast<size_t>(image[i])]) - expected;
        sum.add(eg * ei);
    }
    return sum.value();
}

double equivalence_check(const ProgressionProfile& p) {
    VarianceReport r = variance(p);
    double phi = static_cast<double>(r.phi);
    double total = static_cast<double>(p.total);
    double main = p.cq * static_cast<double>(p.x) / static_cast<double>(p.q);
    double T = static_cast<double>(r.T);

    double form1 = T - 2.0 * main * total + phi * main * main;
    double shift = total - phi * main;
    double form2 = T - total * total / phi + shift * shift / phi;

    return std::max(std::abs(r.V - form1), std::abs(r.V - form2));
}

}  // namespace sqf
