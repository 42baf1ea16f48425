#include "sqf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sqf/progressions.hpp"

namespace sqf {

const char* const kSweepCsvHeader =
    "x,q,phi,V,centered_variance,T,thm1_env,blomer_env,hooley_env,mn_ratio,"
    "moment1,moment1_env,exceed_c1,exceed_c2,exceed_c3,in_range_c3";

SweepRow sweep_row(const MobiusTable& table, int64_t x, int64_t q, double eps) {
    if (q > x) throw std::domain_error("sweep requires q <= x");
    if (!(eps > 0.0 && eps < 0.25)) throw std::invalid_argument("eps must lie in (0, 1/4)");
    ProgressionProfile p = profile(table, x, q);
    VarianceReport vr = variance(p);

    SweepRow row;
    row.x = x;
    row.q = q;
    row.phi = vr.phi;
    row.V = vr.V;
    row.centered_variance = vr.centered_variance.to_double();
    row.T = vr.T;

    const double xd = static_cast<double>(x);
    const double qd = static_cast<double>(q);
    row.thm1_env = std::sqrt(xd * qd) + xd / std::sqrt(qd);
    row.blomer_env = xd + std::min(std::pow(xd, 5.0 / 3.0) / qd, qd * qd);
    row.hooley_env = std::sqrt(xd / qd) + std::sqrt(qd);
    row.mn_ratio = vr.V / std::sqrt(xd * qd);
    row.moment1_env = std::pow(xd, 0.25) * std::pow(qd, 0.75) + std::sqrt(xd) * std::pow(qd, 0.25);

    const double t1 = std::pow(xd / qd, 0.25) * std::pow(xd, eps);
    const double t2 = std::pow(xd, 0.5 + eps) / std::pow(qd, 0.75);
    const double t3 = std::pow(xd, 0.25 + eps) * std::pow(qd, 0.25);
    CompensatedSum abs_sum;
    int64_t over1 = 0, over2 = 0, over3 = 0;
    for (size_t i = 0; i < p.units.elements.size(); ++i) {
        double e = std::abs(error_term(p, p.units.elements[i]));
        abs_sum.add(e);
        if (e > t1) ++over1;
        if (e > t2) ++over2;
        if (e > t3) ++over3;
    }
    row.moment1 = abs_sum.value();
    const double phi_d = static_cast<double>(vr.phi);
    row.exceed_c1 = static_cast<double>(over1) / phi_d;
    row.exceed_c2 = static_cast<double>(over2) / phi_d;
    row.exceed_c3 = static_cast<double>(over3) / phi_d;
    row.in_range_c3 = qd >= std::pow(xd, 0.25) && qd <= std::pow(xd, 1.0 / 3.0);
    return row;
}

std::vector<SweepRow> sweep(const MobiusTable& table, int64_t x,
                            const std::vector<int64_t>& q_list, double eps, int threads) {
    if (q_list.empty()) throw std::invalid_argument("sweep needs at least one modulus");
    if (!(eps > 0.0 && eps < 0.25)) throw std::invalid_argument("eps must lie in (0, 1/4)");
    for (int64_t q : q_list) {
        if (q < 1) throw std::invalid_argument("moduli must be >= 1");
        if (q > x) throw std::domain_error("sweep requires q <= x");
    }
    std::vector<SweepRow> rows(q_list.size());
    parallel_for(static_cast<int64_t>(q_list.size()), threads, [&](int64_t i) {
        rows[static_cast<size_t>(i)] = sweep_row(table, x, q_list[static_cast<size_t>(i)], eps);
    });
    return rows;
}

FitResult fit_exponents(const std::vector<SweepRow>& rows, FitMode mode) {
    FitResult fit;
    std::vector<double> lv, lr;  // log V, log regressor
    for (const SweepRow& row : rows) {
        if (!(row.V > 0.0)) {
            ++fit.n_excluded;
            continue;
        }
        lv.push_back(std::log(row.V));
        lr.push_back(std::log(static_cast<double>(mode == FitMode::VaryQ ? row.q : row.x)));
    }
    fit.n_points = static_cast<int64_t>(lv.size());
    if (fit.n_points < 3) {
        throw std::invalid_argument("fit needs at least 3 rows with positive V");
    }
    CompensatedSum sr, sv, srr, srv;
    for (size_t i = 0; i < lv.size(); ++i) {
        sr.add(lr[i]);
        sv.add(lv[i]);
        srr.add(lr[i] * lr[i]);
        srv.add(lr[i] * lv[i]);
    }
    const double n = static_cast<double>(fit.n_points);
    const double mean_r = sr.value() / n;
    const double mean_v = sv.value() / n;
    const double var_r = srr.value() / n - mean_r * mean_r;
    if (!(var_r > 0.0)) {
        throw std::invalid_argument("fit regressor is constant across rows");
    }
    const double cov = srv.value() / n - mean_r * mean_v;
    const double slope = cov / var_r;
    const double intercept = mean_v - slope * mean_r;
    if (mode == FitMode::VaryQ)
        fit.beta = slope;
    else
        fit.alpha = slope;
    fit.C = std::exp(intercept);
    CompensatedSum rss;
    for (size_t i = 0; i < lv.size(); ++i) {
        double resid = lv[i] - (intercept + slope * lr[i]);
        rss.add(resid * resid);
    }
    fit.residual = std::sqrt(rss.value() / n);
    return fit;
}

std::vector<int64_t> log_spaced_q(int64_t lo, int64_t hi, int steps) {
    if (lo < 1 || hi < lo) throw std::invalid_argument("need 1 <= lo <= hi");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    std::vector<int64_t> qs;
    if (steps == 1) {
        qs.push_back(lo);
        return qs;
    }
    const double llo = std::log(static_cast<double>(lo));
    const double lhi = std::log(static_cast<double>(hi));
    for (int i = 0; i < steps; ++i) {
        double t = llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(steps - 1);
        int64_t q = std::clamp<int64_t>(std::llround(std::exp(t)), lo, hi);
        if (qs.empty() || qs.back() != q) qs.push_back(q);
    }
    return qs;
}

std::vector<int64_t> default_q_grid(int64_t x) {
    if (x < 2) throw std::invalid_argument("default grid needs x >= 2");
    const double l10 = std::log10(static_cast<double>(x));
    // 16 points per decade between x^{0.3} and x, anchored at k/16 decades.
    const int64_t kmin = static_cast<int64_t>(std::ceil(16.0 * 0.3 * l10 - 1e-9));
    const int64_t kmax = static_cast<int64_t>(std::floor(16.0 * l10 + 1e-9));
    std::vector<int64_t> qs;
    for (int64_t k = kmin; k <= kmax; ++k) {
        int64_t q = std::clamp<int64_t>(
            std::llround(std::pow(10.0, static_cast<double>(k) / 16.0)), 1, x);
        if (qs.empty() || qs.back() != q) qs.push_back(q);
    }
    return qs;
}

namespace {

void append_row_csv(std::string& out, const SweepRow& r) {
    out += std::to_string(r.x);
    out += ',';
    out += std::to_string(r.q);
    out += ',';
    out += std::to_string(r.phi);
    out += ',';
    out += format_g12(r.V);
    out += ',';
    out += format_g12(r.centered_variance);
    out += ',';
    out += to_string(r.T);
    out += ',';
    out += format_g12(r.thm1_env);
    out += ',';
    out += format_g12(r.blomer_env);
    out += ',';
    out += format_g12(r.hooley_env);
    out += ',';
    out += format_g12(r.mn_ratio);
    out += ',';
    out += format_g12(r.moment1);
    out += ',';
    out += format_g12(r.moment1_env);
    out += ',';
    out += format_g12(r.exceed_c1);
    out += ',';
    out += format_g12(r.exceed_c2);
    out += ',';
    out += format_g12(r.exceed_c3);
    out += ',';
    out += r.in_range_c3 ? '1' : '0';
    out += '\n';
}

// Round a double to its 12-significant-digit representation so the JSON and
// CSV emitters agree on values.
double round_g12(double v) { return std::stod(format_g12(v)); }

nlohmann::ordered_json row_json(const SweepRow& r) {
    nlohmann::ordered_json j;
    j["x"] = r.x;
    j["q"] = r.q;
    j["phi"] = r.phi;
    j["V"] = round_g12(r.V);
    j["centered_variance"] = round_g12(r.centered_variance);
    j["T"] = to_string(r.T);
    j["thm1_env"] = round_g12(r.thm1_env);
    j["blomer_env"] = round_g12(r.blomer_env);
    j["hooley_env"] = round_g12(r.hooley_env);
    j["mn_ratio"] = round_g12(r.mn_ratio);
    j["moment1"] = round_g12(r.moment1);
    j["moment1_env"] = round_g12(r.moment1_env);
    j["exceed_c1"] = round_g12(r.exceed_c1);
    j["exceed_c2"] = round_g12(r.exceed_c2);
    j["exceed_c3"] = round_g12(r.exceed_c3);
    j["in_range_c3"] = r.in_range_c3;
    return j;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    std::string buf = kSweepCsvHeader;
    buf += '\n';
    for (const SweepRow& r : rows) append_row_csv(buf, r);
    out << buf;
}

void write_csv_file(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_csv(out, rows);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string render_json(const std::vector<SweepRow>& rows, const ReportMeta& meta,
                        const FitResult* fit) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["eps"] = round_g12(meta.eps);
    m["seed"] = meta.seed;
    m["deterministic"] = meta.deterministic;
    if (!meta.deterministic) {
        m["timestamp"] = static_cast<int64_t>(std::time(nullptr));
    }
    doc["meta"] = std::move(m);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const SweepRow& r : rows) arr.push_back(row_json(r));
    doc["rows"] = std::move(arr);
    if (fit != nullptr) {
        nlohmann::ordered_json f;
        f["alpha"] = round_g12(fit->alpha);
        f["beta"] = round_g12(fit->beta);
        f["C"] = round_g12(fit->C);
        f["residual"] = round_g12(fit->residual);
        f["n_points"] = fit->n_points;
        f["n_excluded"] = fit->n_excluded;
        doc["fit"] = std::move(f);
    }
    return doc.dump(2) + "\n";
}

void write_json_file(const std::string& path, const std::vector<SweepRow>& rows,
                     const ReportMeta& meta, const FitResult* fit) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << render_json(rows, meta, fit);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<SweepRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kSweepCsvHeader) throw std::runtime_error("unexpected CSV header: " + line);
    std::vector<SweepRow> rows;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 16) {
            throw std::runtime_error("CSV line " + std::to_string(lineno) + ": expected 16 fields, got " +
                                     std::to_string(f.size()));
        }
        SweepRow r;
        r.x = std::stoll(f[0]);
        r.q = std::stoll(f[1]);
        r.phi = std::stoll(f[2]);
        r.V = std::stod(f[3]);
        r.centered_variance = std::stod(f[4]);
        r.T = parse_i128(f[5]);
        r.thm1_env = std::stod(f[6]);
        r.blomer_env = std::stod(f[7]);
        r.hooley_env = std::stod(f[8]);
        r.mn_ratio = std::stod(f[9]);
        r.moment1 = std::stod(f[10]);
        r.moment1_env = std::stod(f[11]);
        r.exceed_c1 = std::stod(f[12]);
        r.exceed_c2 = std::stod(f[13]);
        r.exceed_c3 = std::stod(f[14]);
        r.in_range_c3 = f[15] == "1";
        rows.push_back(r);
    }
    return rows;
}

std::vector<SweepRow> read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return read_csv(in);
}

}  // namespace sqf
