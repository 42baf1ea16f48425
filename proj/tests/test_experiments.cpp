#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sqf/experiments.hpp"

using namespace sqf;

namespace {

std::string csv_string(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    write_csv(out, rows);
    return out.str();
}

SweepRow synthetic_row(int64_t x, int64_t q, double V) {
    SweepRow r;
    r.x = x;
    r.q = q;
    r.phi = q;  // irrelevant to the fit
    r.V = V;
    return r;
}

}  // namespace

TEST_CASE("sweep rows carry consistent envelopes and fractions") {
    MobiusTable t = sieve_mobius(20000);
    for (int64_t q : {int64_t{1}, int64_t{7}, int64_t{97}, int64_t{1024}, int64_t{19997}}) {
        SweepRow r = sweep_row(t, 20000, q, 0.05);
        INFO("q = ", q);
        double x = 20000.0, qd = static_cast<double>(q);
        REQUIRE(r.thm1_env == doctest::Approx(std::sqrt(x * qd) + x / std::sqrt(qd)));
        REQUIRE(r.blomer_env ==
                doctest::Approx(x + std::min(std::pow(x, 5.0 / 3.0) / qd, qd * qd)));
        REQUIRE(r.hooley_env == doctest::Approx(std::sqrt(x / qd) + std::sqrt(qd)));
        REQUIRE(r.moment1_env ==
                doctest::Approx(std::pow(x, 0.25) * std::pow(qd, 0.75) +
                                std::sqrt(x) * std::pow(qd, 0.25)));
        REQUIRE(r.mn_ratio == doctest::Approx(r.V / std::sqrt(x * qd)));
        REQUIRE(r.V >= 0.0);
        for (double f : {r.exceed_c1, r.exceed_c2, r.exceed_c3}) {
            REQUIRE(f >= 0.0);
            REQUIRE(f <= 1.0);
        }
        // Cauchy-Schwarz: (sum |E|)^2 <= phi * sum E^2.
        REQUIRE(r.moment1 * r.moment1 <=
                static_cast<double>(r.phi) * r.V * (1.0 + 1e-10) + 1e-12);
        REQUIRE(r.in_range_c3 ==
                (std::pow(x, 0.25) <= qd && qd <= std::pow(x, 1.0 / 3.0)));
    }
}

TEST_CASE("exceedance fractions shrink as eps grows") {
    MobiusTable t = sieve_mobius(10000);
    for (int64_t q : {int64_t{30}, int64_t{101}}) {
        SweepRow lo = sweep_row(t, 10000, q, 0.01);
        SweepRow hi = sweep_row(t, 10000, q, 0.20);
        INFO("q = ", q);
        REQUIRE(hi.exceed_c1 <= lo.exceed_c1);
        REQUIRE(hi.exceed_c2 <= lo.exceed_c2);
        REQUIRE(hi.exceed_c3 <= lo.exceed_c3);
    }
}

TEST_CASE("sweep argument validation") {
    MobiusTable t = sieve_mobius(100);
    CHECK_THROWS_AS(sweep_row(t, 50, 51, 0.05), std::domain_error);
    CHECK_THROWS_AS(sweep_row(t, 50, 7, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sweep_row(t, 50, 7, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(sweep(t, 50, {}, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(sweep(t, 50, {0}, 0.05), std::invalid_argument);
}

TEST_CASE("sweep output does not depend on the thread count") {
    MobiusTable t = sieve_mobius(5000);
    std::vector<int64_t> qs = {3, 7, 12, 97, 144, 500, 1009, 4999};
    std::string one = csv_string(sweep(t, 5000, qs, 0.05, 1));
    std::string four = csv_string(sweep(t, 5000, qs, 0.05, 4));
    std::string eight = csv_string(sweep(t, 5000, qs, 0.05, 8));
    CHECK(one == four);
    CHECK(one == eight);
}

TEST_CASE("fit recovers an exact power law in q") {
    std::vector<SweepRow> rows;
    for (int64_t q : {10, 20, 40, 80, 160, 320}) {
        rows.push_back(synthetic_row(1000000, q, 3.5 * std::pow(static_cast<double>(q), 0.5)));
    }
    FitResult f = fit_exponents(rows, FitMode::VaryQ);
    CHECK(f.beta == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.alpha == 0.0);
    CHECK(f.C == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(f.residual == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(f.n_points == 6);
    CHECK(f.n_excluded == 0);
}

TEST_CASE("fit recovers an exact power law in x") {
    std::vector<SweepRow> rows;
    for (int64_t x : {1000, 10000, 100000, 1000000}) {
        rows.push_back(synthetic_row(x, 7, 0.25 * std::pow(static_cast<double>(x), 0.75)));
    }
    FitResult f = fit_exponents(rows, FitMode::VaryX);
    CHECK(f.alpha == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(f.beta == 0.0);
    CHECK(f.C == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("fit of a constant series reports exponent zero") {
    std::vector<SweepRow> rows;
    for (int64_t q : {11, 23, 47, 95}) rows.push_back(synthetic_row(100000, q, 7.0));
    FitResult f = fit_exponents(rows, FitMode::VaryQ);
    CHECK(f.beta == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.C == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("fit excludes nonpositive variances and needs three points") {
    std::vector<SweepRow> rows;
    rows.push_back(synthetic_row(1000, 2, 0.0));  // excluded
    for (int64_t q : {4, 8, 16, 32}) {
        rows.push_back(synthetic_row(1000, q, 2.0 * static_cast<double>(q)));
    }
    FitResult f = fit_exponents(rows, FitMode::VaryQ);
    CHECK(f.n_excluded == 1);
    CHECK(f.n_points == 4);
    CHECK(f.beta == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<SweepRow> tiny = {synthetic_row(10, 1, 1.0), synthetic_row(10, 2, 2.0)};
    CHECK_THROWS_AS(fit_exponents(tiny, FitMode::VaryQ), std::invalid_argument);
    std::vector<SweepRow> flat = {synthetic_row(10, 3, 1.0), synthetic_row(10, 3, 2.0),
                                  synthetic_row(10, 3, 3.0)};
    CHECK_THROWS_AS(fit_exponents(flat, FitMode::VaryQ), std::invalid_argument);
}

TEST_CASE("modulus grids have the promised shape") {
    std::vector<int64_t> g = log_spaced_q(1000, 1000000, 20);
    REQUIRE(g.size() <= 20);
    REQUIRE(g.front() == 1000);
    REQUIRE(g.back() == 1000000);
    for (size_t i = 1; i < g.size(); ++i) REQUIRE(g[i] > g[i - 1]);
    CHECK(log_spaced_q(50, 50, 1) == std::vector<int64_t>{50});
    CHECK_THROWS_AS(log_spaced_q(0, 10, 5), std::invalid_argument);
    CHECK_THROWS_AS(log_spaced_q(10, 5, 5), std::invalid_argument);

    std::vector<int64_t> d = default_q_grid(1000000);
    REQUIRE_FALSE(d.empty());
    CHECK(d.front() >= static_cast<int64_t>(std::pow(1e6, 0.3)) - 1);
    CHECK(d.back() == 1000000);
    for (size_t i = 1; i < d.size(); ++i) REQUIRE(d[i] > d[i - 1]);
    // 16 points per decade over [x^{0.3}, x]: about 0.7 * 6 decades * 16.
    CHECK(d.size() >= 60);
    CHECK(d.size() <= 120);
}

TEST_CASE("csv writes a bare header for an empty sweep") {
    CHECK(csv_string({}) == std::string(kSweepCsvHeader) + "\n");
}

TEST_CASE("csv round-trips byte for byte") {
    MobiusTable t = sieve_mobius(10000);
    std::vector<SweepRow> rows = sweep(t, 10000, {4, 97, 1009}, 0.05);
    std::string first = csv_string(rows);
    std::istringstream in(first);
    std::vector<SweepRow> back = read_csv(in);
    REQUIRE(back.size() == rows.size());
    CHECK(csv_string(back) == first);
    CHECK(back[1].q == 97);
    CHECK(back[1].T == rows[1].T);
    CHECK(back[2].in_range_c3 == rows[2].in_range_c3);
}

TEST_CASE("csv parser rejects malformed input") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_csv(empty), std::runtime_error);
    std::istringstream bad_header("x,q,phi\n");
    CHECK_THROWS_AS(read_csv(bad_header), std::runtime_error);
    std::istringstream short_row(std::string(kSweepCsvHeader) + "\n1,2,3\n");
    CHECK_THROWS_AS(read_csv(short_row), std::runtime_error);
}

TEST_CASE("json reports carry the meta block and honor determinism") {
    MobiusTable t = sieve_mobius(1000);
    std::vector<SweepRow> rows = sweep(t, 1000, {7, 30}, 0.05);
    ReportMeta det{0.05, 42, true};
    std::string js = render_json(rows, det);
    CHECK(js.find("\"tool\": \"sqfvar\"") != std::string::npos);
    CHECK(js.find("\"seed\": 42") != std::string::npos);
    CHECK(js.find("\"deterministic\": true") != std::string::npos);
    CHECK(js.find("timestamp") == std::string::npos);
    CHECK(js.find("\"rows\"") != std::string::npos);

    ReportMeta live{0.05, 42, false};
    CHECK(render_json(rows, live).find("timestamp") != std::string::npos);

    FitResult fit = fit_exponents(
        {synthetic_row(10, 2, 2.0), synthetic_row(10, 4, 4.0), synthetic_row(10, 8, 8.0)},
        FitMode::VaryQ);
    std::string with_fit = render_json(rows, det, &fit);
    CHECK(with_fit.find("\"fit\"") != std::string::npos);
    CHECK(with_fit.find("\"beta\": 1") != std::string::npos);

    // Deterministic renders are reproducible byte for byte.
    CHECK(render_json(rows, det) == render_json(rows, det));
}
