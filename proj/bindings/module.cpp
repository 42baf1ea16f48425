// Python bindings for the main operations: sieves, progression profiles,
// variance routes, character sums, the lemma oracles, and sweeps. Exact
// integers wider than 64 bits cross as Python ints, exact rationals as
// fractions.Fraction.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sqf/arith.hpp"
#include "sqf/characters.hpp"
#include "sqf/experiments.hpp"
#include "sqf/lemmas.hpp"
#include "sqf/progressions.hpp"
#include "sqf/selfcheck.hpp"

namespace py = pybind11;
using namespace sqf;

namespace {

py::object py_bigint(const i128& v) {
    return py::module_::import("builtins").attr("int")(to_string(v));
}

py::object py_fraction(const Rat128& r) {
    return py::module_::import("fractions").attr("Fraction")(r.str());
}

py::object py_fraction(const BigRational& r) {
    std::string s = numerator(r).str() + "/" + denominator(r).str();
    return py::module_::import("fractions").attr("Fraction")(s);
}

void check_index(const MobiusTable& t, int64_t n) {
    if (n < 1 || n > t.limit) {
        throw std::out_of_range("n must lie in [1, " + std::to_string(t.limit) + "]");
    }
}

py::dict variance_dict(const ProgressionProfile& p) {
    VarianceReport r = variance(p);
    py::dict d;
    d["x"] = r.x;
    d["q"] = r.q;
    d["phi"] = r.phi;
    d["V"] = r.V;
    d["centered_variance"] = py_fraction(r.centered_variance);
    d["T"] = py_bigint(r.T);
    d["main_term_T"] = r.main_term_T;
    d["residual"] = r.residual;
    return d;
}

py::dict row_dict(const SweepRow& r) {
    py::dict d;
    d["x"] = r.x;
    d["q"] = r.q;
    d["phi"] = r.phi;
    d["V"] = r.V;
    d["centered_variance"] = r.centered_variance;
    d["T"] = py_bigint(r.T);
    d["thm1_env"] = r.thm1_env;
    d["blomer_env"] = r.blomer_env;
    d["hooley_env"] = r.hooley_env;
    d["mn_ratio"] = r.mn_ratio;
    d["moment1"] = r.moment1;
    d["moment1_env"] = r.moment1_env;
    d["exceed_c1"] = r.exceed_c1;
    d["exceed_c2"] = r.exceed_c2;
    d["exceed_c3"] = r.exceed_c3;
    d["in_range_c3"] = r.in_range_c3;
    return d;
}

CharEvalMode parse_mode(const std::string& mode) {
    if (mode == "bucketed") return CharEvalMode::Bucketed;
    if (mode == "direct") return CharEvalMode::Direct;
    throw std::invalid_argument("mode must be 'bucketed' or 'direct'");
}

}  // namespace

PYBIND11_MODULE(_sqfvar, m) {
    m.doc() = "squarefree integers in arithmetic progressions: variance toolkit";
    m.attr("__version__") = kToolVersion;

    py::class_<MobiusTable>(m, "MobiusTable")
        .def_readonly("limit", &MobiusTable::limit)
        .def(
            "mu",
            [](const MobiusTable& t, int64_t n) {
                check_index(t, n);
                return t.mu(n);
            },
            py::arg("n"))
        .def(
            "squarefree",
            [](const MobiusTable& t, int64_t n) {
                check_index(t, n);
                return t.squarefree(n);
            },
            py::arg("n"))
        .def(
            "squarefree_count",
            [](const MobiusTable& t, int64_t upto) {
                check_index(t, upto);
                return t.squarefree_count(upto);
            },
            py::arg("upto"))
        .def("__repr__", [](const MobiusTable& t) {
            return "<MobiusTable limit=" + std::to_string(t.limit) + ">";
        });

    m.def("sieve_mobius", &sieve_mobius, py::arg("limit"),
          py::arg("memory_cap") = kDefaultSieveCap,
          "Sieve Mobius values and squarefree flags for 1..limit.");
    m.def("squarefree_count_segmented", &squarefree_count_segmented, py::arg("limit"),
          py::arg("block_size") = int64_t{1} << 20);
    m.def("euler_phi", &euler_phi, py::arg("q"));
    m.def("c_constant", &c_constant, py::arg("q"),
          "Density constant prod_{p not dividing q} (1 - p^-2).");
    m.def(
        "unit_group", [](int64_t q) { return unit_group(q).elements; }, py::arg("q"),
        "Ascending unit residues mod q.");

    m.def(
        "profile",
        [](const MobiusTable& t, int64_t x, int64_t q) {
            ProgressionProfile p = profile(t, x, q);
            py::dict d;
            d["x"] = p.x;
            d["q"] = p.q;
            d["residues"] = p.units.elements;
            d["counts"] = p.counts;
            d["total"] = p.total;
            d["cq"] = p.cq;
            d["expected_per_class"] = p.expected_per_class();
            return d;
        },
        py::arg("table"), py::arg("x"), py::arg("q"),
        "Squarefree counts S(x;q,a) per unit class a.");
    m.def(
        "error_term",
        [](const MobiusTable& t, int64_t x, int64_t q, int64_t a) {
            return error_term(profile(t, x, q), a);
        },
        py::arg("table"), py::arg("x"), py::arg("q"), py::arg("a"));
    m.def(
        "variance",
        [](const MobiusTable& t, int64_t x, int64_t q) {
            return variance_dict(profile(t, x, q));
        },
        py::arg("table"), py::arg("x"), py::arg("q"),
        "V, exact centered variance, and exact T for one (x, q).");
    m.def(
        "t_via_convolution",
        [](const MobiusTable& t, int64_t x, int64_t q) {
            return py_bigint(t_via_convolution(t, x, q));
        },
        py::arg("table"), py::arg("x"), py::arg("q"),
        "Pair-correlation T through the opened mu convolution.");
    m.def(
        "t_gamma",
        [](const MobiusTable& t, int64_t x, int64_t q, const std::string& gamma, uint64_t seed) {
            ProgressionProfile p = profile(t, x, q);
            return py_bigint(t_gamma(p, ResidueBijection::parse(gamma, seed)));
        },
        py::arg("table"), py::arg("x"), py::arg("q"), py::arg("gamma") = "identity",
        py::arg("seed") = uint64_t{1});
    m.def(
        "v_gamma",
        [](const MobiusTable& t, int64_t x, int64_t q, const std::string& gamma, uint64_t seed) {
            ProgressionProfile p = profile(t, x, q);
            return v_gamma(p, ResidueBijection::parse(gamma, seed));
        },
        py::arg("table"), py::arg("x"), py::arg("q"), py::arg("gamma") = "identity",
        py::arg("seed") = uint64_t{1});

    m.def(
        "character_variance",
        [](const MobiusTable& t, int64_t q, int64_t x, const std::string& mode) {
            return character_variance(t, q, x, parse_mode(mode));
        },
        py::arg("table"), py::arg("q"), py::arg("x"), py::arg("mode") = "bucketed",
        "(1/phi) sum over nonprincipal chi of |sum chi(n)|^2.");
    m.def(
        "twisted_sum",
        [](const MobiusTable& t, int64_t q, int64_t index, int64_t x, const std::string& mode) {
            CharacterGroup g = build_group(q);
            return twisted_sum(t, g, character_at(g, index), x, parse_mode(mode));
        },
        py::arg("table"), py::arg("q"), py::arg("index"), py::arg("x"),
        py::arg("mode") = "bucketed",
        "Sum over squarefree n <= x of chi(n), chi picked by mixed-radix index.");
    m.def(
        "character_orders",
        [](int64_t q) { return build_group(q).orders; }, py::arg("q"),
        "Cyclic decomposition of (Z/qZ)^x.");
    m.def("orthogonality_selfcheck",
          [](int64_t q) { return orthogonality_selfcheck(build_group(q)); }, py::arg("q"));

    m.def(
        "count_primitive_solutions",
        [](std::array<int64_t, 3> w, std::array<double, 3> U) {
            return count_primitive_solutions({w, U});
        },
        py::arg("w"), py::arg("U"),
        "Primitive u with |u_i| <= U_i and w.u = 0, exact.");
    m.def(
        "lemma1_bound",
        [](std::array<int64_t, 3> w, std::array<double, 3> U) { return lemma1_bound({w, U}); },
        py::arg("w"), py::arg("U"));
    m.def(
        "lemma1_exhaustive_check",
        [](int64_t wmax, int64_t umax) {
            Lemma1Audit a = lemma1_exhaustive_check(wmax, umax);
            py::dict d;
            d["instances"] = a.instances;
            d["violations"] = a.violations;
            d["min_slack"] = a.min_slack;
            return d;
        },
        py::arg("wmax"), py::arg("umax"));
    m.def(
        "congruence_count",
        [](double V1, double V2, int64_t q, int64_t a1, int64_t a2, bool with_m) {
            CongruenceCounts c = congruence_count(V1, V2, q, a1, a2, with_m);
            py::dict d;
            d["N"] = c.N;
            d["N_star"] = py_fraction(c.N_star);
            d["M"] = c.has_m ? py_fraction(c.M) : py::object(py::none());
            return d;
        },
        py::arg("V1"), py::arg("V2"), py::arg("q"), py::arg("a1"), py::arg("a2"),
        py::arg("with_m") = true,
        "N, N*, M for a1 v1 = a2 v2 (mod q) over the box, dual-route checked.");
    m.def(
        "m_quantity",
        [](int64_t q, int64_t a1, int64_t a2) { return py_fraction(m_quantity(q, a1, a2)); },
        py::arg("q"), py::arg("a1"), py::arg("a2"));
    m.def(
        "lemma3_average",
        [](int64_t q, double F1, double F2, int64_t exact_q_cap) {
            DyadicAverage a = lemma3_average(q, F1, F2, exact_q_cap);
            py::dict d;
            d["sum"] = a.sum;
            d["envelope"] = a.envelope;
            d["terms"] = a.terms;
            d["exact"] = a.exact;
            return d;
        },
        py::arg("q"), py::arg("F1"), py::arg("F2"), py::arg("exact_q_cap") = int64_t{500});

    m.def(
        "sweep",
        [](const MobiusTable& t, int64_t x, const std::vector<int64_t>& q_list, double eps,
           int threads) {
            py::list out;
            for (const SweepRow& r : sweep(t, x, q_list, eps, threads)) out.append(row_dict(r));
            return out;
        },
        py::arg("table"), py::arg("x"), py::arg("q_list"), py::arg("eps") = 0.05,
        py::arg("threads") = 1, "One row of variance statistics and envelopes per modulus.");
    m.def("log_spaced_q", &log_spaced_q, py::arg("lo"), py::arg("hi"), py::arg("steps"));
    m.def("default_q_grid", &default_q_grid, py::arg("x"));
    m.def(
        "fit_exponents",
        [](const std::vector<py::dict>& rows, const std::string& mode) {
            std::vector<SweepRow> rs;
            for (const py::dict& d : rows) {
                SweepRow r;
                r.x = py::cast<int64_t>(d["x"]);
                r.q = py::cast<int64_t>(d["q"]);
                r.V = py::cast<double>(d["V"]);
                rs.push_back(r);
            }
            FitMode fm;
            if (mode == "vary-q") {
                fm = FitMode::VaryQ;
            } else if (mode == "vary-x") {
                fm = FitMode::VaryX;
            } else {
                throw std::invalid_argument("mode must be 'vary-q' or 'vary-x'");
            }
            FitResult f = fit_exponents(rs, fm);
            py::dict d;
            d["alpha"] = f.alpha;
            d["beta"] = f.beta;
            d["C"] = f.C;
            d["residual"] = f.residual;
            d["n_points"] = f.n_points;
            d["n_excluded"] = f.n_excluded;
            return d;
        },
        py::arg("rows"), py::arg("mode") = "vary-q",
        "Least-squares power-law fit of V on rows from sweep().");

    m.def(
        "run_selfcheck",
        [](uint64_t seed) {
            py::list out;
            for (const CheckLine& line : run_selfcheck(seed, false)) {
                py::dict d;
                d["name"] = line.name;
                d["max_defect"] = line.max_defect;
                d["pass"] = line.pass;
                d["detail"] = line.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("seed") = uint64_t{1}, "Exact-identity suite at small scale.");
}
