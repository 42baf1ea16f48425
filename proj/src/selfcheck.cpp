#include "sqf/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sqf/arith.hpp"
#include "sqf/characters.hpp"
#include "sqf/lemmas.hpp"
#include "sqf/progressions.hpp"

namespace sqf {

namespace {

constexpr int64_t kX = 10000;
constexpr int64_t kQMax = 60;

CheckLine exact_line(const std::string& name, int64_t worst, const std::string& detail) {
    return {name, static_cast<double>(worst), worst == 0, detail};
}

CheckLine float_line(const std::string& name, double worst, double tol,
                     const std::string& detail) {
    return {name, worst, worst <= tol, detail};
}

}  // namespace

std::vector<CheckLine> run_selfcheck(uint64_t seed, bool inject_mu_fault) {
    std::vector<CheckLine> lines;
    MobiusTable table = sieve_mobius(kX);
    if (inject_mu_fault) {
        table.mu_values[4999] = 1;  // 4999 is prime; correct value is -1
    }

    // Sum of mu(d) over d | n vanishes for every n > 1 and equals 1 at n = 1.
    {
        int64_t bad = 0;
        int64_t first_bad = 0;
        std::vector<int64_t> divisor_sum(static_cast<size_t>(kX) + 1, 0);
        for (int64_t d = 1; d <= kX; ++d) {
            int m = table.mu(d);
            if (m == 0) continue;
            for (int64_t n = d; n <= kX; n += d) divisor_sum[static_cast<size_t>(n)] += m;
        }
        for (int64_t n = 1; n <= kX; ++n) {
            if (divisor_sum[static_cast<size_t>(n)] != (n == 1 ? 1 : 0)) {
                ++bad;
                if (first_bad == 0) first_bad = n;
            }
        }
        lines.push_back(exact_line("mobius-divisor-sum", bad,
                                   bad == 0 ? "n <= " + std::to_string(kX)
                                            : "first failure at n = " + std::to_string(first_bad)));
    }

    // Segmented block counting agrees with the in-memory table.
    {
        int64_t worst = 0;
        for (int64_t x : {int64_t{100}, int64_t{5000}, kX}) {
            worst = std::max<int64_t>(worst, std::llabs(squarefree_count_segmented(x, 1024) -
                                                        table.squarefree_count(x)));
        }
        lines.push_back(exact_line("squarefree-count-segmented", worst, "x in {100, 5000, 10000}"));
    }

    // T by convolution over d e^2 classes equals T from per-class counts.
    {
        int64_t bad = 0;
        std::string detail = "q <= " + std::to_string(kQMax) + ", x = " + std::to_string(kX);
        for (int64_t q = 1; q <= kQMax; ++q) {
            VarianceReport vr = variance(profile(table, kX, q));
            if (t_via_convolution(table, kX, q) != vr.T) {
                ++bad;
                if (bad == 1) detail = "first failure at q = " + std::to_string(q);
            }
        }
        lines.push_back(exact_line("pair-correlation-convolution", bad, detail));
    }

    // phi * sum (phi S_a - total)^2 telescopes to phi^2 (phi T - total^2).
    {
        int64_t bad = 0;
        std::string detail = "q <= " + std::to_string(kQMax);
        for (int64_t q = 1; q <= kQMax; ++q) {
            ProgressionProfile p = profile(table, kX, q);
            VarianceReport vr = variance(p);
            i128 phi = p.units.phi;
            i128 lhs = 0;
            for (int64_t a : p.units.elements) {
                i128 d = phi * p.count_for(a) - p.total;
                lhs += d * d;
            }
            Rat128 direct(lhs, phi * phi);
            if (!(direct == vr.centered_variance)) {
                ++bad;
                if (bad == 1) detail = "first failure at q = " + std::to_string(q);
            }
        }
        lines.push_back(exact_line("centered-variance-rational", bad, detail));
    }

    // Character orthogonality relations.
    {
        double worst = 0.0;
        for (int64_t q = 1; q <= kQMax; ++q) {
            worst = std::max(worst, orthogonality_selfcheck(build_group(q), 30, seed));
        }
        lines.push_back(
            float_line("character-orthogonality", worst, 1e-9, "q <= " + std::to_string(kQMax)));
    }

    // Character-sum variance equals the exact centered variance.
    {
        double worst = 0.0;
        for (int64_t q = 1; q <= kQMax; ++q) {
            CharacterGroup g = build_group(q);
            double cv = character_variance(table, g, kX);
            double exact = variance(profile(table, kX, q)).centered_variance.to_double();
            worst = std::max(worst, std::abs(cv - exact) / std::max(1.0, std::abs(exact)));
        }
        lines.push_back(float_line("character-variance-bridge", worst, 1e-9,
                                   "q <= " + std::to_string(kQMax) + ", x = " + std::to_string(kX)));
    }

    // Both closed forms of V agree with the accumulated V.
    {
        double worst = 0.0;
        for (int64_t q = 1; q <= kQMax; ++q) {
            ProgressionProfile p = profile(table, kX, q);
            double scale = std::max(1.0, static_cast<double>(p.units.phi) * p.cq * p.cq *
                                             static_cast<double>(kX) / q *
                                             static_cast<double>(kX) / q);
            worst = std::max(worst, equivalence_check(p) / scale);
        }
        lines.push_back(float_line("variance-closed-forms", worst, 1e-10,
                                   "q <= " + std::to_string(kQMax) + ", relative to main term"));
    }

    // T - T_gamma = V - V_gamma and 0 <= T - T_gamma <= 2V for bijections.
    {
        double worst = 0.0;
        int64_t bound_bad = 0;
        std::string detail = "q in {12, 35, 60}, gamma in {identity, inv, mul, random}";
        for (int64_t q : {12, 35, 60}) {
            ProgressionProfile p = profile(table, kX, q);
            VarianceReport vr = variance(p);
            int64_t unit = 1;
            for (int64_t c = 2; c < q; ++c) {
                if (std::gcd(c, q) == 1) {
                    unit = c;
                    break;
                }
            }
            std::vector<ResidueBijection> gammas = {
                ResidueBijection::identity(), ResidueBijection::inverse(),
                ResidueBijection::mul_unit(unit), ResidueBijection::random_perm(seed)};
            for (const ResidueBijection& gamma : gammas) {
                i128 tg = t_gamma(p, gamma);
                double vg = v_gamma(p, gamma);
                double lhs = static_cast<double>(vr.T - tg);
                double defect = std::abs(lhs - (vr.V - vg)) / std::max(1.0, std::abs(vr.V));
                worst = std::max(worst, defect);
                if (vr.T - tg < 0) ++bound_bad;
                if (static_cast<double>(vr.T - tg) > 2.0 * vr.V * (1.0 + 1e-12) + 1e-9)
                    ++bound_bad;
            }
        }
        if (bound_bad > 0) detail = "range violation: T - T_gamma outside [0, 2V]";
        lines.push_back({"gamma-rearrangement", worst, worst <= 1e-8 && bound_bad == 0, detail});
    }

    // Residue-bucketed and direct congruence counts agree exactly.
    {
        std::mt19937_64 rng(seed);
        int64_t bad = 0;
        std::string detail = "200 sampled instances, q <= 60, V_i <= 300";
        for (int iter = 0; iter < 200; ++iter) {
            int64_t q = 1 + static_cast<int64_t>(rng() % kQMax);
            double V1 = 1.0 + static_cast<double>(rng() % 300);
            double V2 = 1.0 + static_cast<double>(rng() % 300);
            auto draw_unit = [&]() {
                while (true) {
                    int64_t a = 1 + static_cast<int64_t>(rng() % (2 * static_cast<uint64_t>(q)));
                    int64_t s = (rng() & 1) ? a : -a;
                    if (std::gcd(a, q) == 1) return s;
                }
            };
            int64_t a1 = draw_unit(), a2 = draw_unit();
            if (congruence_count_direct(V1, V2, q, a1, a2) !=
                congruence_count_bucketed(V1, V2, q, a1, a2)) {
                ++bad;
                if (bad == 1) {
                    detail = "first failure at q=" + std::to_string(q) + " a1=" +
                             std::to_string(a1) + " a2=" + std::to_string(a2);
                }
            }
        }
        lines.push_back(exact_line("congruence-count-methods", bad, detail));
    }

    // Fast M equals the literal double-loop M; M is symmetric in (a1, a2).
    {
        int64_t bad = 0;
        std::string detail = "q <= 30, several unit pairs";
        for (int64_t q = 1; q <= 30; ++q) {
            for (int64_t a1 : {1, 5, 7}) {
                for (int64_t a2 : {1, 11, -3}) {
                    if (std::gcd(std::llabs(a1), q) != 1 || std::gcd(std::llabs(a2), q) != 1)
                        continue;
                    BigRational fast = m_quantity(q, a1, a2);
                    if (fast != m_quantity_naive(q, a1, a2)) ++bad;
                    if (fast != m_quantity(q, a2, a1)) ++bad;
                }
            }
        }
        lines.push_back(exact_line("m-quantity-methods", bad, detail));
    }

    // Lemma 1 explicit bound on a small exhaustive grid.
    {
        Lemma1Audit audit = lemma1_exhaustive_check(6, 5);
        lines.push_back(exact_line("lemma1-bound", audit.violations,
                                   std::to_string(audit.instances) + " instances, min slack " +
                                       format_g12(audit.min_slack)));
    }

    return lines;
}

}  // namespace sqf
