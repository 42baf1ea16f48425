// Command-line entry point: sieves, per-class profiles, variance reports,
// character cross-checks, lemma oracles, grid sweeps, exponent fits, and the
// exact-identity selfcheck. Exit codes: 0 success, 1 identity or assertion
// failure, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sqf/arith.hpp"
#include "sqf/characters.hpp"
#include "sqf/experiments.hpp"
#include "sqf/lemmas.hpp"
#include "sqf/progressions.hpp"
#include "sqf/selfcheck.hpp"

using nlohmann::ordered_json;

namespace {

// Value-round floats so JSON and CSV emitters agree on 12 significant digits.
double g12(double v) { return std::stod(sqf::format_g12(v)); }

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + out_path);
}

void emit_json(const ordered_json& doc, const std::string& out_path) {
    emit(doc.dump(2) + "\n", out_path);
}

struct SweepSpec {
    int64_t x = 0;  // 0 = default pair {1e5, 1e6}
    std::vector<int64_t> q_list;
    int64_t q_min = 0, q_max = 0;
    int q_steps = 0;
    double eps = 0.05;
    uint64_t seed = 1;
    int threads = 1;
    bool deterministic = false;
    std::string out_path;
    std::string format = "csv";
};

void add_sweep_options(CLI::App* cmd, SweepSpec& spec) {
    cmd->add_option("--x", spec.x, "upper limit x (default: both 10^5 and 10^6)");
    cmd->add_option("--q", spec.q_list, "explicit moduli (repeatable)");
    cmd->add_option("--q-min", spec.q_min, "log-spaced grid: smallest q");
    cmd->add_option("--q-max", spec.q_max, "log-spaced grid: largest q");
    cmd->add_option("--q-steps", spec.q_steps, "log-spaced grid: number of points");
    cmd->add_option("--eps", spec.eps, "epsilon for the density-corollary thresholds")
        ->check(CLI::Range(1e-9, 0.2499));
    cmd->add_option("--seed", spec.seed, "seed recorded in metadata");
    cmd->add_option("--threads", spec.threads, "worker threads")->check(CLI::Range(1, 256));
    cmd->add_flag("--deterministic", spec.deterministic,
                  "omit timestamps; byte-identical reruns");
    cmd->add_option("--out", spec.out_path, "output file (default stdout)");
    cmd->add_option("--format", spec.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

std::vector<sqf::SweepRow> run_sweep_spec(const SweepSpec& spec) {
    std::vector<int64_t> xs;
    if (spec.x > 0) {
        xs.push_back(spec.x);
    } else if (!spec.q_list.empty() || spec.q_steps > 0) {
        xs.push_back(1000000);
    } else {
        xs = {100000, 1000000};
    }
    std::vector<sqf::SweepRow> rows;
    for (int64_t x : xs) {
        std::vector<int64_t> qs;
        if (!spec.q_list.empty()) {
            qs = spec.q_list;
        } else if (spec.q_steps > 0) {
            if (spec.q_min < 1 || spec.q_max < spec.q_min) {
                throw std::invalid_argument("--q-steps needs 1 <= --q-min <= --q-max");
            }
            qs = sqf::log_spaced_q(spec.q_min, spec.q_max, spec.q_steps);
        } else {
            qs = sqf::default_q_grid(x);
        }
        sqf::MobiusTable table = sqf::sieve_mobius(x);
        auto part = sqf::sweep(table, x, qs, spec.eps, spec.threads);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

int run_sieve(int64_t x, int64_t block, const std::string& dump_path,
              const std::string& out_path) {
    sqf::MobiusTable table = sqf::sieve_mobius(x);
    int64_t count = table.squarefree_count(x);
    ordered_json doc;
    doc["x"] = x;
    doc["squarefree_count"] = count;
    doc["density"] = g12(static_cast<double>(count) / static_cast<double>(x));
    doc["asymptotic_density"] = g12(sqf::c_constant(1));
    if (x <= 10000000) {
        int64_t seg = sqf::squarefree_count_segmented(x, block);
        doc["segmented_count"] = seg;
        if (seg != count) {
            std::cerr << "sieve cross-check failed: table " << count << " vs segmented " << seg
                      << "\n";
            return 1;
        }
    }
    if (!dump_path.empty()) {
        sqf::dump_mobius(table, dump_path);
        doc["dump"] = dump_path;
    }
    emit_json(doc, out_path);
    return 0;
}

int run_profile(int64_t x, int64_t q, const std::string& format, const std::string& out_path) {
    sqf::MobiusTable table = sqf::sieve_mobius(x);
    sqf::ProgressionProfile p = sqf::profile(table, x, q);
    if (format == "csv") {
        std::string buf = "a,count,error\n";
        for (int64_t a : p.units.elements) {
            buf += std::to_string(a);
            buf += ',';
            buf += std::to_string(p.count_for(a));
            buf += ',';
            buf += sqf::format_g12(sqf::error_term(p, a));
            buf += '\n';
        }
        emit(buf, out_path);
        return 0;
    }
    ordered_json doc;
    doc["x"] = x;
    doc["q"] = q;
    doc["phi"] = p.units.phi;
    doc["cq"] = g12(p.cq);
    doc["expected_per_class"] = g12(p.expected_per_class());
    doc["total"] = p.total;
    ordered_json classes = ordered_json::array();
    for (int64_t a : p.units.elements) {
        ordered_json c;
        c["a"] = a;
        c["count"] = p.count_for(a);
        c["error"] = g12(sqf::error_term(p, a));
        classes.push_back(std::move(c));
    }
    doc["classes"] = std::move(classes);
    emit_json(doc, out_path);
    return 0;
}

int run_variance(int64_t x, int64_t q, const std::string& out_path) {
    sqf::MobiusTable table = sqf::sieve_mobius(x);
    sqf::ProgressionProfile p = sqf::profile(table, x, q);
    sqf::VarianceReport vr = sqf::variance(p);
    const double xd = static_cast<double>(x), qd = static_cast<double>(q);
    double thm1 = std::sqrt(xd * qd) + xd / std::sqrt(qd);
    ordered_json doc;
    doc["x"] = x;
    doc["q"] = q;
    doc["phi"] = vr.phi;
    doc["cq"] = g12(p.cq);
    doc["V"] = g12(vr.V);
    doc["centered_variance"] = g12(vr.centered_variance.to_double());
    doc["centered_variance_exact"] = vr.centered_variance.str();
    doc["T"] = sqf::to_string(vr.T);
    doc["main_term_T"] = g12(vr.main_term_T);
    doc["thm1_env"] = g12(thm1);
    doc["v_over_thm1"] = g12(vr.V / thm1);
    doc["closed_form_defect"] = g12(sqf::equivalence_check(p));
    emit_json(doc, out_path);
    return 0;
}

int run_characters(int64_t x, int64_t q, const std::string& mode, const std::string& out_path) {
    sqf::MobiusTable table = sqf::sieve_mobius(x);
    sqf::CharacterGroup group = sqf::build_group(q);
    sqf::CharEvalMode m =
        mode == "direct" ? sqf::CharEvalMode::Direct : sqf::CharEvalMode::Bucketed;
    double cv = sqf::character_variance(table, group, x, m);
    double exact = sqf::variance(sqf::profile(table, x, q)).centered_variance.to_double();
    double rel = std::abs(cv - exact) / std::max(1.0, std::abs(exact));
    double orth = sqf::orthogonality_selfcheck(group, 100, 1);
    ordered_json doc;
    doc["x"] = x;
    doc["q"] = q;
    doc["phi"] = group.phi;
    doc["lambda"] = group.lambda;
    doc["mode"] = mode;
    doc["character_variance"] = g12(cv);
    doc["centered_variance"] = g12(exact);
    doc["bridge_defect_rel"] = g12(rel);
    doc["orthogonality_defect"] = g12(orth);
    emit_json(doc, out_path);
    if (rel > 1e-6 || orth > 1e-8) {
        std::cerr << "character bridge outside tolerance\n";
        return 1;
    }
    return 0;
}

int run_lemma1(const std::vector<int64_t>& w, const std::vector<double>& u, bool audit,
               int64_t wmax, int64_t umax, const std::string& out_path) {
    ordered_json doc;
    if (audit) {
        sqf::Lemma1Audit a = sqf::lemma1_exhaustive_check(wmax, umax);
        doc["wmax"] = wmax;
        doc["umax"] = umax;
        doc["instances"] = a.instances;
        doc["violations"] = a.violations;
        doc["min_slack"] = g12(a.min_slack);
        emit_json(doc, out_path);
        return a.violations == 0 ? 0 : 1;
    }
    sqf::LinearFormInstance inst({w[0], w[1], w[2]}, {u[0], u[1], u[2]});
    int64_t count = sqf::count_primitive_solutions(inst);
    double bound = sqf::lemma1_bound(inst);
    doc["w"] = w;
    doc["U"] = u;
    doc["count"] = count;
    doc["bound"] = g12(bound);
    doc["slack"] = g12(bound - static_cast<double>(count));
    emit_json(doc, out_path);
    return static_cast<double>(count) <= bound ? 0 : 1;
}

int run_lemma2(double v1, double v2, int64_t q, int64_t a1, int64_t a2, bool skip_m,
               const std::string& out_path) {
    sqf::CongruenceCounts cc = sqf::congruence_count(v1, v2, q, a1, a2, !skip_m);
    ordered_json doc;
    doc["V1"] = g12(v1);
    doc["V2"] = g12(v2);
    doc["q"] = q;
    doc["a1"] = a1;
    doc["a2"] = a2;
    doc["phi"] = sqf::euler_phi(q);
    doc["N"] = cc.N;
    doc["N_star_exact"] = cc.N_star.str();
    doc["N_star"] = g12(cc.N_star.to_double());
    doc["N_minus_N_star"] = g12(static_cast<double>(cc.N) - cc.N_star.to_double());
    if (cc.has_m) {
        doc["M_exact"] = cc.M.str();
        doc["M"] = g12(cc.M.convert_to<double>());
    }
    emit_json(doc, out_path);
    return 0;
}

int run_lemma3(int64_t q, double f1, double f2, int64_t exact_cap, const std::string& out_path) {
    sqf::DyadicAverage dy = sqf::lemma3_average(q, f1, f2, exact_cap);
    ordered_json doc;
    doc["q"] = q;
    doc["F1"] = g12(f1);
    doc["F2"] = g12(f2);
    doc["sum"] = g12(dy.sum);
    doc["envelope"] = g12(dy.envelope);
    doc["ratio"] = g12(dy.sum / dy.envelope);
    doc["terms"] = dy.terms;
    doc["exact"] = dy.exact;
    emit_json(doc, out_path);
    return 0;
}

int run_gamma(int64_t x, int64_t q, const std::string& gamma_spec, uint64_t seed,
              const std::string& out_path) {
    sqf::MobiusTable table = sqf::sieve_mobius(x);
    sqf::ProgressionProfile p = sqf::profile(table, x, q);
    sqf::VarianceReport vr = sqf::variance(p);
    sqf::ResidueBijection gamma = sqf::ResidueBijection::parse(gamma_spec, seed);
    sqf::i128 tg = sqf::t_gamma(p, gamma);
    double vg = sqf::v_gamma(p, gamma);
    double lhs = static_cast<double>(vr.T - tg);
    double rhs = vr.V - vg;
    double defect_rel = std::abs(lhs - rhs) / std::max(1.0, std::abs(vr.V));
    bool nonneg = vr.T - tg >= 0;
    bool within = lhs <= 2.0 * vr.V * (1.0 + 1e-12) + 1e-9;
    ordered_json doc;
    doc["x"] = x;
    doc["q"] = q;
    doc["gamma"] = gamma.describe();
    doc["T"] = sqf::to_string(vr.T);
    doc["T_gamma"] = sqf::to_string(tg);
    doc["T_minus_T_gamma"] = sqf::to_string(vr.T - tg);
    doc["V"] = g12(vr.V);
    doc["V_gamma"] = g12(vg);
    doc["identity_defect_rel"] = g12(defect_rel);
    doc["range_ok"] = nonneg && within;
    emit_json(doc, out_path);
    if (defect_rel > 1e-8 || !nonneg || !within) {
        std::cerr << "gamma rearrangement identity outside tolerance\n";
        return 1;
    }
    return 0;
}

int run_sweep_cmd(const SweepSpec& spec) {
    std::vector<sqf::SweepRow> rows = run_sweep_spec(spec);
    if (spec.format == "csv") {
        std::ostringstream ss;
        sqf::write_csv(ss, rows);
        emit(ss.str(), spec.out_path);
    } else {
        sqf::ReportMeta meta{spec.eps, spec.seed, spec.deterministic};
        emit(sqf::render_json(rows, meta), spec.out_path);
    }
    return 0;
}

int run_fit(const SweepSpec& spec, const std::string& in_path, const std::string& mode_name) {
    std::vector<sqf::SweepRow> rows =
        in_path.empty() ? run_sweep_spec(spec) : sqf::read_csv_file(in_path);
    sqf::FitMode mode = mode_name == "vary-x" ? sqf::FitMode::VaryX : sqf::FitMode::VaryQ;
    sqf::FitResult fit = sqf::fit_exponents(rows, mode);
    if (fit.n_excluded > 0) {
        std::cerr << "warning: excluded " << fit.n_excluded << " rows with V <= 0\n";
    }
    ordered_json doc;
    doc["mode"] = mode_name;
    doc["alpha"] = g12(fit.alpha);
    doc["beta"] = g12(fit.beta);
    doc["C"] = g12(fit.C);
    doc["residual"] = g12(fit.residual);
    doc["n_points"] = fit.n_points;
    doc["n_excluded"] = fit.n_excluded;
    emit_json(doc, spec.out_path);
    return 0;
}

int run_selfcheck_cmd(uint64_t seed, bool inject_fault) {
    std::vector<sqf::CheckLine> lines = sqf::run_selfcheck(seed, inject_fault);
    bool all_pass = true;
    for (const sqf::CheckLine& line : lines) {
        std::printf("%-32s max defect %-12s %s  (%s)\n", line.name.c_str(),
                    sqf::format_g12(line.max_defect).c_str(), line.pass ? "PASS" : "FAIL",
                    line.detail.c_str());
        all_pass = all_pass && line.pass;
    }
    std::printf("selfcheck: %s\n", all_pass ? "all identities hold" : "FAILURES detected");
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"squarefree integers in arithmetic progressions: variance toolkit"};
    app.set_config("--config", "", "config file with key=value lines");
    app.require_subcommand(1);
    int exit_code = 0;

    // sieve
    auto* sieve_cmd = app.add_subcommand("sieve", "sieve Mobius values and count squarefrees");
    int64_t sieve_x = 1000000;
    int64_t sieve_block = 1 << 20;
    std::string sieve_dump, sieve_out;
    sieve_cmd->add_option("--x", sieve_x, "sieve limit")->required()->check(CLI::PositiveNumber);
    sieve_cmd->add_option("--block", sieve_block, "segment size for the block count");
    sieve_cmd->add_option("--dump", sieve_dump, "write the table to this file");
    sieve_cmd->add_option("--out", sieve_out, "output file (default stdout)");
    sieve_cmd->callback([&] { exit_code = run_sieve(sieve_x, sieve_block, sieve_dump, sieve_out); });

    // profile
    auto* profile_cmd = app.add_subcommand("profile", "per-class squarefree counts S(x;q,a)");
    int64_t pr_x = 0, pr_q = 0;
    std::string pr_format = "csv", pr_out;
    profile_cmd->add_option("--x", pr_x, "upper limit")->required()->check(CLI::PositiveNumber);
    profile_cmd->add_option("--q", pr_q, "modulus")->required()->check(CLI::PositiveNumber);
    profile_cmd->add_option("--format", pr_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    profile_cmd->add_option("--out", pr_out, "output file (default stdout)");
    profile_cmd->callback([&] { exit_code = run_profile(pr_x, pr_q, pr_format, pr_out); });

    // variance
    auto* var_cmd = app.add_subcommand("variance", "V(x;q), T(x;q) and the exact centered form");
    int64_t va_x = 0, va_q = 0;
    std::string va_out;
    var_cmd->add_option("--x", va_x, "upper limit")->required()->check(CLI::PositiveNumber);
    var_cmd->add_option("--q", va_q, "modulus")->required()->check(CLI::PositiveNumber);
    var_cmd->add_option("--out", va_out, "output file (default stdout)");
    var_cmd->callback([&] { exit_code = run_variance(va_x, va_q, va_out); });

    // characters
    auto* char_cmd =
        app.add_subcommand("characters", "character-sum variance vs the centered variance");
    int64_t ch_x = 0, ch_q = 0;
    std::string ch_mode = "bucketed", ch_out;
    char_cmd->add_option("--x", ch_x, "upper limit")->required()->check(CLI::PositiveNumber);
    char_cmd->add_option("--q", ch_q, "modulus")->required()->check(CLI::PositiveNumber);
    char_cmd->add_option("--mode", ch_mode, "bucketed or direct")
        ->check(CLI::IsMember({"bucketed", "direct"}));
    char_cmd->add_option("--out", ch_out, "output file (default stdout)");
    char_cmd->callback([&] { exit_code = run_characters(ch_x, ch_q, ch_mode, ch_out); });

    // lemma1
    auto* l1_cmd = app.add_subcommand("lemma1", "primitive solutions of w.u = 0 in a box");
    std::vector<int64_t> l1_w;
    std::vector<double> l1_u;
    bool l1_audit = false;
    int64_t l1_wmax = 10, l1_umax = 6;
    std::string l1_out;
    l1_cmd->add_option("--w", l1_w, "form coefficients w0 w1 w2")->expected(3);
    l1_cmd->add_option("--u", l1_u, "box half-widths U0 U1 U2")->expected(3);
    l1_cmd->add_flag("--audit", l1_audit, "exhaustive bound audit over a (w, U) grid");
    l1_cmd->add_option("--wmax", l1_wmax, "audit: max |w_i|");
    l1_cmd->add_option("--umax", l1_umax, "audit: max U_i");
    l1_cmd->add_option("--out", l1_out, "output file (default stdout)");
    l1_cmd->callback([&] {
        if (!l1_audit && (l1_w.size() != 3 || l1_u.size() != 3)) {
            throw CLI::ValidationError("lemma1", "need --w and --u (3 values each) or --audit");
        }
        exit_code = run_lemma1(l1_w, l1_u, l1_audit, l1_wmax, l1_umax, l1_out);
    });

    // lemma2
    auto* l2_cmd = app.add_subcommand("lemma2", "congruence counts N, N* and M");
    double l2_v1 = 0, l2_v2 = 0;
    int64_t l2_q = 0, l2_a1 = 1, l2_a2 = 1;
    bool l2_skip_m = false;
    std::string l2_out;
    l2_cmd->add_option("--v1", l2_v1, "box side V1")->required();
    l2_cmd->add_option("--v2", l2_v2, "box side V2")->required();
    l2_cmd->add_option("--q", l2_q, "modulus")->required()->check(CLI::PositiveNumber);
    l2_cmd->add_option("--a1", l2_a1, "left coefficient (unit mod q)");
    l2_cmd->add_option("--a2", l2_a2, "right coefficient (unit mod q)");
    l2_cmd->add_flag("--skip-m", l2_skip_m, "do not compute M (faster for large q)");
    l2_cmd->add_option("--out", l2_out, "output file (default stdout)");
    l2_cmd->callback(
        [&] { exit_code = run_lemma2(l2_v1, l2_v2, l2_q, l2_a1, l2_a2, l2_skip_m, l2_out); });

    // lemma3
    auto* l3_cmd = app.add_subcommand("lemma3", "dyadic average of M(q, f1^2, f2^2)");
    int64_t l3_q = 0, l3_cap = 500;
    double l3_f1 = 0.5, l3_f2 = 0.5;
    std::string l3_out;
    l3_cmd->add_option("--q", l3_q, "modulus")->required()->check(CLI::PositiveNumber);
    l3_cmd->add_option("--f1", l3_f1, "dyadic anchor F1 (sum over F1 < f1 <= 2 F1)");
    l3_cmd->add_option("--f2", l3_f2, "dyadic anchor F2");
    l3_cmd->add_option("--exact-cap", l3_cap, "largest q evaluated with exact rationals");
    l3_cmd->add_option("--out", l3_out, "output file (default stdout)");
    l3_cmd->callback([&] { exit_code = run_lemma3(l3_q, l3_f1, l3_f2, l3_cap, l3_out); });

    // gamma
    auto* ga_cmd = app.add_subcommand("gamma", "rearranged pair correlation T_gamma and V_gamma");
    int64_t ga_x = 0, ga_q = 0;
    uint64_t ga_seed = 1;
    std::string ga_spec = "identity", ga_out;
    ga_cmd->add_option("--x", ga_x, "upper limit")->required()->check(CLI::PositiveNumber);
    ga_cmd->add_option("--q", ga_q, "modulus")->required()->check(CLI::PositiveNumber);
    ga_cmd->add_option("--gamma", ga_spec, "identity | mul:c | inv | pow:k | random");
    ga_cmd->add_option("--seed", ga_seed, "seed for gamma=random");
    ga_cmd->add_option("--out", ga_out, "output file (default stdout)");
    ga_cmd->callback([&] { exit_code = run_gamma(ga_x, ga_q, ga_spec, ga_seed, ga_out); });

    // sweep
    auto* sw_cmd = app.add_subcommand("sweep", "grid sweep over (x, q) with envelope columns");
    SweepSpec sw_spec;
    add_sweep_options(sw_cmd, sw_spec);
    sw_cmd->callback([&] { exit_code = run_sweep_cmd(sw_spec); });

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "least-squares exponent fit on sweep rows");
    SweepSpec fit_spec;
    std::string fit_in, fit_mode = "vary-q";
    add_sweep_options(fit_cmd, fit_spec);
    fit_cmd->add_option("--in", fit_in, "read rows from this CSV instead of sweeping");
    fit_cmd->add_option("--mode", fit_mode, "vary-q (fit beta) or vary-x (fit alpha)")
        ->check(CLI::IsMember({"vary-q", "vary-x"}));
    fit_cmd->callback([&] { exit_code = run_fit(fit_spec, fit_in, fit_mode); });

    // selfcheck
    auto* sc_cmd = app.add_subcommand("selfcheck", "exact-identity suite at small scale");
    uint64_t sc_seed = 1;
    int sc_threads = 1;
    bool sc_fault = false;
    sc_cmd->add_option("--seed", sc_seed, "seed for sampled instances");
    sc_cmd->add_option("--threads", sc_threads, "accepted for interface parity; checks are "
                                                "sequential and thread-count independent");
    sc_cmd->add_flag("--inject-mu-fault", sc_fault, "corrupt one Mobius value (testing hook)");
    sc_cmd->callback([&] { exit_code = run_selfcheck_cmd(sc_seed, sc_fault); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
