#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sqf/arith.hpp"
#include "sqf/numeric.hpp"

namespace sqf {

inline constexpr const char* kToolName = "sqfvar";
inline constexpr const char* kToolVersion = "1.0.0";

// One (x, q) cell of a sweep: variance statistics next to the bound envelopes
// they are compared against (all envelopes with the epsilon powers stripped).
struct SweepRow {
    int64_t x = 0;
    int64_t q = 0;
    int64_t phi = 0;
    double V = 0.0;                  // sum of E^2 over unit classes
    double centered_variance = 0.0;  // exact rational (phi*T - total^2)/phi, as real
    i128 T = 0;                      // sum of S_a^2 over unit classes, exact
    double thm1_env = 0.0;           // x^{1/2} q^{1/2} + x q^{-1/2}
    double blomer_env = 0.0;         // x + min(x^{5/3}/q, q^2)
    double hooley_env = 0.0;         // (x/q)^{1/2} + q^{1/2}
    double mn_ratio = 0.0;           // V / (x^{1/2} q^{1/2})
    double moment1 = 0.0;            // sum of |E| over unit classes
    double moment1_env = 0.0;        // x^{1/4} q^{3/4} + x^{1/2} q^{1/4}
    double exceed_c1 = 0.0;          // fraction with |E| > (x/q)^{1/4} x^eps
    double exceed_c2 = 0.0;          // fraction with |E| > x^{1/2+eps} / q^{3/4}
    double exceed_c3 = 0.0;          // fraction with |E| > x^{1/4+eps} q^{1/4}
    bool in_range_c3 = false;        // x^{1/4} <= q <= x^{1/3}
};

// One row per q, computed in parallel and collected in input order. Requires
// q <= x (domain error beyond), x <= table.limit, and eps in (0, 1/4).
std::vector<SweepRow> sweep(const MobiusTable& table, int64_t x,
                            const std::vector<int64_t>& q_list, double eps, int threads = 1);

SweepRow sweep_row(const MobiusTable& table, int64_t x, int64_t q, double eps);

enum class FitMode {
    VaryQ,  // fixed x, fit V ~ C * q^beta   (alpha reported as 0)
    VaryX,  // fixed q, fit V ~ C * x^alpha  (beta reported as 0)
};

struct FitResult {
    double alpha = 0.0;
    double beta = 0.0;
    double C = 0.0;
    double residual = 0.0;  // RMS of log-residuals
    int64_t n_points = 0;
    int64_t n_excluded = 0;  // rows dropped for V <= 0
};

// Least squares on log V against the mode's regressor. Rows with V <= 0 are
// excluded (counted in n_excluded); fewer than 3 usable rows is an error.
FitResult fit_exponents(const std::vector<SweepRow>& rows, FitMode mode);

// Geometric grid of moduli, rounded to integers, deduplicated, clamped to
// [lo, hi]. steps = 1 yields {lo}.
std::vector<int64_t> log_spaced_q(int64_t lo, int64_t hi, int steps);

// Default grid: 16 values per decade, log-spaced across [x^{0.3}, x].
std::vector<int64_t> default_q_grid(int64_t x);

struct ReportMeta {
    double eps = 0.05;
    uint64_t seed = 0;
    bool deterministic = false;
};

// CSV schema (fixed column order, floats as %.12g, booleans as 0/1):
//   x,q,phi,V,centered_variance,T,thm1_env,blomer_env,hooley_env,mn_ratio,
//   moment1,moment1_env,exceed_c1,exceed_c2,exceed_c3,in_range_c3
extern const char* const kSweepCsvHeader;
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_csv_file(const std::string& path, const std::vector<SweepRow>& rows);

// JSON document: {"meta": {...}, "rows": [...]} with optional "fit". The meta
// block omits the timestamp when deterministic is set; row field names match
// the CSV columns. Floats are value-rounded to 12 significant digits.
std::string render_json(const std::vector<SweepRow>& rows, const ReportMeta& meta,
                        const FitResult* fit = nullptr);
void write_json_file(const std::string& path, const std::vector<SweepRow>& rows,
                     const ReportMeta& meta, const FitResult* fit = nullptr);

// Strict parser for the CSV schema above (used for round-trip checks and the
// fit subcommand's file input).
std::vector<SweepRow> read_csv(std::istream& in);
std::vector<SweepRow> read_csv_file(const std::string& path);

}  // namespace sqf
