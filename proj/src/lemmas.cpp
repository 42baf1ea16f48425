#include "sqf/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sqf/arith.hpp"

namespace sqf {

namespace {

int64_t gcd3(int64_t a, int64_t b, int64_t c) {
    return std::gcd(std::gcd(std::llabs(a), std::llabs(b)), std::llabs(c));
}

std::vector<int64_t> divisors_of(int64_t q) {
    std::vector<int64_t> divs;
    for (int64_t d = 1; d * d <= q; ++d) {
        if (q % d == 0) {
            divs.push_back(d);
            if (d != q / d) divs.push_back(q / d);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

void require_units(int64_t q, int64_t a1, int64_t a2) {
    if (q < 1) throw std::invalid_argument("modulus must be >= 1");
    if (a1 == 0 || a2 == 0) throw std::domain_error("a1 and a2 must be nonzero");
    if (std::gcd(std::llabs(a1), q) != 1 || std::gcd(std::llabs(a2), q) != 1) {
        throw std::domain_error("a1 and a2 must be coprime to q");
    }
}

}  // namespace

LinearFormInstance::LinearFormInstance(std::array<int64_t, 3> w_in, std::array<double, 3> u_in)
    : w(w_in), U(u_in) {
    if (gcd3(w[0], w[1], w[2]) != 1) {
        throw std::domain_error("w must be a primitive vector (gcd of entries 1)");
    }
    for (double u : U) {
        if (!(u >= 1.0)) throw std::invalid_argument("box sides U_i must be >= 1");
    }
}

int64_t count_primitive_solutions(const LinearFormInstance& inst) {
    for (double u : inst.U) {
        if (u > 1000.0) throw std::invalid_argument("enumeration requires U_i <= 1000");
    }
    std::array<int64_t, 3> bound{static_cast<int64_t>(std::floor(inst.U[0])),
                                 static_cast<int64_t>(std::floor(inst.U[1])),
                                 static_cast<int64_t>(std::floor(inst.U[2]))};
    // Solve for the last nonzero coordinate; loop over the other two.
    int pivot = inst.w[2] != 0 ? 2 : inst.w[1] != 0 ? 1 : 0;
    int i = pivot == 0 ? 1 : 0;
    int j = pivot == 2 ? 1 : 2;
    const int64_t wi = inst.w[i], wj = inst.w[j], wp = inst.w[pivot];
    int64_t count = 0;
    std::array<int64_t, 3> u{};
    for (int64_t ui = -bound[i]; ui <= bound[i]; ++ui) {
        for (int64_t uj = -bound[j]; uj <= bound[j]; ++uj) {
            int64_t t = -(wi * ui + wj * uj);
            if (t % wp != 0) continue;
            int64_t up = t / wp;
            if (std::llabs(up) > bound[pivot]) continue;
            u[i] = ui;
            u[j] = uj;
            u[pivot] = up;
            if (gcd3(u[0], u[1], u[2]) == 1) ++count;
        }
    }
    return count;
}

double lemma1_bound(const LinearFormInstance& inst) {
    double denom = 0.0;
    for (int i = 0; i < 3; ++i) {
        denom = std::max(denom, std::abs(static_cast<double>(inst.w[i])) * inst.U[i]);
    }
    return 12.0 * std::numbers::pi * inst.U[0] * inst.U[1] * inst.U[2] / denom + 4.0;
}

Lemma1Audit lemma1_exhaustive_check(int64_t wmax, int64_t umax) {
    if (wmax < 1 || umax < 1) throw std::invalid_argument("wmax and umax must be >= 1");
    Lemma1Audit audit;
    audit.min_slack = std::numeric_limits<double>::infinity();
    const size_t side = static_cast<size_t>(umax) + 1;
    std::vector<int64_t> grid(side * side * side);
    auto at = [&](int64_t a, int64_t b, int64_t c) -> int64_t& {
        return grid[(static_cast<size_t>(a) * side + static_cast<size_t>(b)) * side +
                    static_cast<size_t>(c)];
    };

    for (int64_t w0 = -wmax; w0 <= wmax; ++w0) {
        for (int64_t w1 = -wmax; w1 <= wmax; ++w1) {
            for (int64_t w2 = -wmax; w2 <= wmax; ++w2) {
                if (gcd3(w0, w1, w2) != 1) continue;
                std::fill(grid.begin(), grid.end(), 0);
                // One sweep over (u0, u1); solve for u2 (or scan it when the
                // form does not involve u2). Bucket each solution by |u_i|.
                for (int64_t u0 = -umax; u0 <= umax; ++u0) {
                    for (int64_t u1 = -umax; u1 <= umax; ++u1) {
                        int64_t partial = w0 * u0 + w1 * u1;
                        if (w2 != 0) {
                            if (partial % w2 != 0) continue;
                            int64_t u2 = -partial / w2;
                            if (std::llabs(u2) > umax) continue;
                            if (gcd3(u0, u1, u2) != 1) continue;
                            ++at(std::llabs(u0), std::llabs(u1), std::llabs(u2));
                        } else if (partial == 0) {
                            for (int64_t u2 = -umax; u2 <= umax; ++u2) {
                                if (gcd3(u0, u1, u2) != 1) continue;
                                ++at(std::llabs(u0), std::llabs(u1), std::llabs(u2));
                            }
                        }
                    }
                }
                // Prefix sums turn buckets into counts for every box size.
                for (size_t a = 0; a < side; ++a)
                    for (size_t b = 0; b < side; ++b)
                        for (size_t c = 1; c < side; ++c)
                            grid[(a * side + b) * side + c] += grid[(a * side + b) * side + c - 1];
                for (size_t a = 0; a < side; ++a)
                    for (size_t b = 1; b < side; ++b)
                        for (size_t c = 0; c < side; ++c)
                            grid[(a * side + b) * side + c] += grid[(a * side + b - 1) * side + c];
                for (size_t a = 1; a < side; ++a)
                    for (size_t b = 0; b < side; ++b)
                        for (size_t c = 0; c < side; ++c)
                            grid[(a * side + b) * side + c] += grid[((a - 1) * side + b) * side + c];

                for (int64_t b0 = 1; b0 <= umax; ++b0) {
                    for (int64_t b1 = 1; b1 <= umax; ++b1) {
                        for (int64_t b2 = 1; b2 <= umax; ++b2) {
                            double denom =
                                std::max({std::abs(static_cast<double>(w0)) * b0,
                                          std::abs(static_cast<double>(w1)) * b1,
                                          std::abs(static_cast<double>(w2)) * b2});
                            double bound = 12.0 * std::numbers::pi *
                                               static_cast<double>(b0 * b1 * b2) / denom +
                                           4.0;
                            int64_t count = at(b0, b1, b2);
                            ++audit.instances;
                            double slack = bound - static_cast<double>(count);
                            audit.min_slack = std::min(audit.min_slack, slack);
                            if (static_cast<double>(count) > bound) ++audit.violations;
                        }
                    }
                }
            }
        }
    }
    return audit;
}

int64_t congruence_count_direct(double V1, double V2, int64_t q, int64_t a1, int64_t a2) {
    require_units(q, a1, a2);
    if (!(V1 >= 1.0) || !(V2 >= 1.0)) throw std::invalid_argument("V1 and V2 must be >= 1");
    const int64_t B1 = static_cast<int64_t>(std::floor(V1));
    const int64_t B2 = static_cast<int64_t>(std::floor(V2));
    if (q == 1) return B1 * B2;
    std::vector<uint8_t> unit(static_cast<size_t>(q));
    for (int64_t r = 0; r < q; ++r) unit[static_cast<size_t>(r)] = std::gcd(r, q) == 1;
    const int64_t a1r = mod_floor(a1, q);
    const int64_t a2r = mod_floor(a2, q);
    int64_t count = 0;
    int64_t r1 = 0, t1 = 0;  // v1 mod q and a1*v1 mod q
    for (int64_t v1 = 1; v1 <= B1; ++v1) {
        if (++r1 == q) r1 = 0;
        if ((t1 += a1r) >= q) t1 -= q;
        if (!unit[static_cast<size_t>(r1)]) continue;
        int64_t r2 = 0, t2 = 0;
        for (int64_t v2 = 1; v2 <= B2; ++v2) {
            if (++r2 == q) r2 = 0;
            if ((t2 += a2r) >= q) t2 -= q;
            if (unit[static_cast<size_t>(r2)] && t1 == t2) ++count;
        }
    }
    return count;
}

int64_t congruence_count_bucketed(double V1, double V2, int64_t q, int64_t a1, int64_t a2) {
    require_units(q, a1, a2);
    if (!(V1 >= 1.0) || !(V2 >= 1.0)) throw std::invalid_argument("V1 and V2 must be >= 1");
    const int64_t B1 = static_cast<int64_t>(std::floor(V1));
    const int64_t B2 = static_cast<int64_t>(std::floor(V2));
    if (q == 1) return B1 * B2;
    // #{v in [1,B] : v = c (mod q)} for 0 <= c < q.
    auto class_count = [q](int64_t B, int64_t c) {
        return B / q + ((c >= 1 && c <= B % q) ? 1 : 0);
    };
    // v1 = a1^{-1} a2 v2 (mod q).
    const int64_t ratio = static_cast<int64_t>(
        static_cast<i128>(mod_inverse(mod_floor(a1, q), q)) * mod_floor(a2, q) % q);
    int64_t count = 0;
    for (int64_t c = 1; c < q; ++c) {
        if (std::gcd(c, q) != 1) continue;
        int64_t c1 = static_cast<int64_t>(static_cast<i128>(ratio) * c % q);
        count += class_count(B1, c1) * class_count(B2, c);
    }
    return count;
}

CongruenceCounts congruence_count(double V1, double V2, int64_t q, int64_t a1, int64_t a2,
                                  bool with_m) {
    require_units(q, a1, a2);
    if (!(V1 >= 1.0) || !(V2 >= 1.0)) throw std::invalid_argument("V1 and V2 must be >= 1");
    if (V1 * V2 > 1e8) throw std::invalid_argument("direct method requires V1*V2 <= 1e8");
    CongruenceCounts out;
    out.V1 = V1;
    out.V2 = V2;
    out.q = q;
    out.a1 = a1;
    out.a2 = a2;
    out.N = congruence_count_bucketed(V1, V2, q, a1, a2);
    int64_t direct = congruence_count_direct(V1, V2, q, a1, a2);
    if (direct != out.N) {
        throw std::logic_error("congruence count methods disagree: bucketed " +
                               std::to_string(out.N) + " vs direct " + std::to_string(direct));
    }
    const int64_t B1 = static_cast<int64_t>(std::floor(V1));
    const int64_t B2 = static_cast<int64_t>(std::floor(V2));
    int64_t phi = euler_phi(q);
    if (q == 1) {
        out.N_star = Rat128(static_cast<i128>(B1) * B2, 1);
    } else {
        auto units_upto = [q](int64_t B) {
            int64_t n = 0;
            for (int64_t c = 1; c < q; ++c) {
                if (std::gcd(c, q) != 1) continue;
                n += B / q + (c <= B % q ? 1 : 0);
            }
            return n;
        };
        out.N_star = Rat128(static_cast<i128>(units_upto(B1)) * units_upto(B2), phi);
    }
    if (with_m) {
        out.M = m_quantity(q, a1, a2);
        out.has_m = true;
    }
    return out;
}

BigRational m_quantity(int64_t q, int64_t a1, int64_t a2) {
    require_units(q, a1, a2);
    if (q > 2000) throw std::invalid_argument("m_quantity requires q <= 2000");
    const int64_t half = q / 2;
    if (half == 0) return BigRational(0);

    // Everything is accumulated as integer multiples of 1/D^2 with
    // D = lcm(1..half), so there is exactly one rational reduction at the end.
    BigInt D = 1;
    for (int64_t k = 2; k <= half; ++k) D = boost::multiprecision::lcm(D, BigInt(k));
    std::vector<BigInt> recip(static_cast<size_t>(half) + 1);
    for (int64_t k = 1; k <= half; ++k) recip[static_cast<size_t>(k)] = D / k;

    BigInt numer = 0;
    std::vector<BigInt> H;
    for (int64_t d : divisors_of(q)) {
        // H[t] = sum of D/|s| over 0 < |s| <= q/2 with s = t (mod d).
        H.assign(static_cast<size_t>(d), BigInt(0));
        for (int64_t k = 1; k <= half; ++k) {
            H[static_cast<size_t>(k % d)] += recip[static_cast<size_t>(k)];
            H[static_cast<size_t>((d - k % d) % d)] += recip[static_cast<size_t>(k)];
        }
        // a1 s + a2 r = 0 (mod d)  <=>  s = -a1^{-1} a2 * r (mod d).
        int64_t c = mod_floor(-(mod_inverse(mod_floor(a1, d), d) * mod_floor(a2, d)) % d, d);
        BigInt inner = 0;
        for (int64_t k = 1; k <= half; ++k) {
            int64_t t_pos = static_cast<int64_t>(static_cast<i128>(c) * k % d);
            int64_t t_neg = (d - t_pos) % d;
            inner += recip[static_cast<size_t>(k)] *
                     (H[static_cast<size_t>(t_pos)] + H[static_cast<size_t>(t_neg)]);
        }
        numer += d * inner;
    }
    return BigRational(numer, D * D);
}

BigRational m_quantity_naive(int64_t q, int64_t a1, int64_t a2) {
    require_units(q, a1, a2);
    if (q > 500) throw std::invalid_argument("m_quantity_naive requires q <= 500");
    const int64_t half = q / 2;
    BigRational total = 0;
    for (int64_t d : divisors_of(q)) {
        for (int64_t r = -half; r <= half; ++r) {
            if (r == 0) continue;
            for (int64_t s = -half; s <= half; ++s) {
                if (s == 0) continue;
                i128 val = static_cast<i128>(a1) * s + static_cast<i128>(a2) * r;
                if (static_cast<int64_t>(val % d) != 0) continue;
                total += BigRational(d, std::llabs(r) * std::llabs(s));
            }
        }
    }
    return total;
}

double m_quantity_float(int64_t q, int64_t a1, int64_t a2) {
    require_units(q, a1, a2);
    const int64_t half = q / 2;
    if (half == 0) return 0.0;
    std::vector<double> recip(static_cast<size_t>(half) + 1);
    for (int64_t k = 1; k <= half; ++k) recip[static_cast<size_t>(k)] = 1.0 / static_cast<double>(k);
    CompensatedSum acc;
    std::vector<double> H;
    for (int64_t d : divisors_of(q)) {
        H.assign(static_cast<size_t>(d), 0.0);
        for (int64_t k = 1; k <= half; ++k) {
            H[static_cast<size_t>(k % d)] += recip[static_cast<size_t>(k)];
            H[static_cast<size_t>((d - k % d) % d)] += recip[static_cast<size_t>(k)];
        }
        int64_t c = mod_floor(-(mod_inverse(mod_floor(a1, d), d) * mod_floor(a2, d)) % d, d);
        for (int64_t k = 1; k <= half; ++k) {
            int64_t t_pos = static_cast<int64_t>(static_cast<i128>(c) * k % d);
            int64_t t_neg = (d - t_pos) % d;
            acc.add(static_cast<double>(d) * recip[static_cast<size_t>(k)] *
                    (H[static_cast<size_t>(t_pos)] + H[static_cast<size_t>(t_neg)]));
        }
    }
    return acc.value();
}

DyadicAverage lemma3_average(int64_t q, double F1, double F2, int64_t exact_q_cap) {
    if (q < 1) throw std::invalid_argument("modulus must be >= 1");
    if (!(F1 >= 0.5) || !(F2 >= 0.5)) throw std::invalid_argument("F1 and F2 must be >= 1/2");
    if (F1 * F2 > 1e4) throw std::invalid_argument("lemma3_average requires F1*F2 <= 1e4");
    DyadicAverage out;
    out.exact = q <= exact_q_cap;
    out.envelope = F1 * F2 + static_cast<double>(q);
    const int64_t lo1 = static_cast<int64_t>(std::floor(F1)) + 1;
    const int64_t hi1 = static_cast<int64_t>(std::floor(2.0 * F1));
    const int64_t lo2 = static_cast<int64_t>(std::floor(F2)) + 1;
    const int64_t hi2 = static_cast<int64_t>(std::floor(2.0 * F2));
    BigRational exact_total = 0;
    CompensatedSum float_total;
    for (int64_t f1 = lo1; f1 <= hi1; ++f1) {
        if (std::gcd(f1, q) != 1) continue;
        for (int64_t f2 = lo2; f2 <= hi2; ++f2) {
            if (std::gcd(f2, q) != 1 || std::gcd(f1, f2) != 1) continue;
            ++out.terms;
            if (out.exact) {
                exact_total += m_quantity(q, f1 * f1, f2 * f2);
            } else {
                float_total.add(m_quantity_float(q, f1 * f1, f2 * f2));
            }
        }
    }
    out.sum = out.exact ? exact_total.convert_to<double>() : float_total.value();
    return out;
}

}  // namespace sqf
