#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "nmfid/certify.hpp"
#include "nmfid/corpus.hpp"
#include "nmfid/linalg.hpp"
#include "oracles.hpp"

using namespace nmfid;

TEST_CASE("part-articulation indexing: canonical and custom maps", "[certify]") {
    PartArticulationIndexing idx(2, 3);
    CHECK(idx.inner() == 6);
    CHECK(idx.r_of(1, 2) == 5);
    CHECK(idx.pa_of(4) == std::pair<index_t, index_t>{1, 1});

    std::vector<std::pair<index_t, index_t>> swap = {{1, 0}, {0, 0}, {1, 1}, {0, 1}};
    PartArticulationIndexing custom(2, 2, swap);
    CHECK(custom.r_of(1, 0) == 0);
    CHECK(custom.pa_of(1) == std::pair<index_t, index_t>{0, 0});

    std::vector<std::pair<index_t, index_t>> dup = {{0, 0}, {0, 0}, {1, 0}, {1, 1}};
    CHECK_THROWS_AS(PartArticulationIndexing(2, 2, dup), std::invalid_argument);
    std::vector<std::pair<index_t, index_t>> oob = {{0, 0}, {0, 1}, {1, 0}, {2, 0}};
    CHECK_THROWS_AS(PartArticulationIndexing(2, 2, oob), std::invalid_argument);
}

TEST_CASE("separability finds and validates detector rows", "[certify]") {
    std::mt19937_64 g(606);
    for (int trial = 0; trial < 10; ++trial) {
        oracle::SfaInstance inst = oracle::random_sfa(g, 2, 3, 3, false);
        PartArticulationIndexing idx(inst.parts, inst.arts);
        SeparabilityResult res = check_separability(inst.w, idx);
        REQUIRE(res.report.verdict == Verdict::holds);
        REQUIRE(res.witness.has_value());
        for (index_t p = 0; p < 2; ++p)
            for (index_t a = 0; a < 3; ++a) {
                index_t row = res.witness->row_for(p, a);
                // The witness row must be supported exactly on r(p, a).
                for (index_t c = 0; c < inst.w.cols(); ++c) {
                    bool nz = inst.w(row, c) != Rational(0);
                    CHECK(nz == (c == idx.r_of(p, a)));
                }
            }
    }

    // Remove one detector and the condition fails, naming the pair.
    oracle::SfaInstance inst = oracle::random_sfa(g, 2, 2, 0, false);
    PartArticulationIndexing idx(2, 2);
    for (index_t m = 0; m < inst.w.rows(); ++m)
        if (inst.w(m, 3) != Rational(0)) inst.w(m, 2) = Rational(1);  // spoil r=3's detector
    CertificateReport rep = check_separability(inst.w, idx).report;
    CHECK(rep.verdict == Verdict::fails);
    CHECK(rep.notes.find("articulation") != std::string::npos);
}

TEST_CASE("complete factorial sampling holds, fails, and guards", "[certify]") {
    PartArticulationIndexing idx(2, 3);
    Matrix<Rational> full = oracle::all_assignment_columns(2, 3);
    CertificateReport ok = check_complete_factorial_sampling(full, idx);
    CHECK(ok.verdict == Verdict::holds);
    CHECK(ok.witness_cols.size() == 9);  // one column per assignment

    // Drop one assignment column.
    std::vector<index_t> keep;
    for (index_t j = 0; j < full.cols(); ++j)
        if (j != 4) keep.push_back(j);
    Matrix<Rational> partial = full.select_cols(keep);
    CertificateReport bad = check_complete_factorial_sampling(partial, idx);
    CHECK(bad.verdict == Verdict::fails);
    CHECK(bad.notes.find("missing") != std::string::npos);

    // 2^20 assignments exceed the sampling guard.
    PartArticulationIndexing big(20, 2);
    Matrix<Rational> h(40, 2, Rational(1));
    CHECK_THROWS_AS(check_complete_factorial_sampling(h, big), CombinatorialLimitError);
}

TEST_CASE("separable-family uniqueness on the benchmark instances", "[certify]") {
    // Three articulations: certified unique within col(W).
    auto t2 = worked_example<Rational>("type2");
    PartArticulationIndexing idx23(2, 3);
    CertificateReport rep = check_donoho(t2.s, t2.factorizations[0], idx23);
    CHECK(rep.verdict == Verdict::holds);

    // Two articulations: the library must refuse to certify.
    auto e1 = worked_example<Rational>("example1");
    PartArticulationIndexing idx22(2, 2);
    CertificateReport a2 = check_donoho(e1.s, e1.factorizations[0], idx22);
    CHECK(a2.verdict == Verdict::unknown);
    CHECK(std::find(a2.flags.begin(), a2.flags.end(), "A=2") != a2.flags.end());

    // Inexact input is rejected loudly.
    Matrix<Rational> wrong = t2.factorizations[0].w;
    wrong(0, 0) += Rational(1);
    Factorization<Rational> bad(wrong, t2.factorizations[0].h);
    CHECK_THROWS_AS(check_donoho(t2.s, bad, idx23), InexactFactorizationError);
}

TEST_CASE("sufficiently spread: default and literal readings", "[certify]") {
    auto t1 = worked_example<Rational>("type1");
    CertificateReport fail = check_sufficiently_spread(t1.factorizations[0].h);
    CHECK(fail.verdict == Verdict::fails);

    // Identity block provides a pure column for every inner index.
    std::mt19937_64 g2(5);
    Matrix<Rational> spread =
        Matrix<Rational>::identity(3).augment_cols(oracle::random_nonneg_matrix(g2, 3, 2));
    CertificateReport ok = check_sufficiently_spread(spread);
    CHECK(ok.verdict == Verdict::holds);
    REQUIRE(ok.witness_cols.size() == 3);
    for (index_t r = 0; r < 3; ++r) {
        index_t col = ok.witness_cols[r];
        for (index_t i = 0; i < 3; ++i)
            CHECK((spread(i, col) != Rational(0)) == (i == r));  // pure column
    }

    CertificateReport literal = check_sufficiently_spread(spread, kDefaultTol,
                                                          SpreadReading::literal_row);
    CHECK(std::find(literal.flags.begin(), literal.flags.end(), "literal-reading") !=
          literal.flags.end());
}

TEST_CASE("boundary close: default, strict, and failure note", "[certify]") {
    auto t1 = worked_example<Rational>("type1");
    const Matrix<Rational>& w = t1.factorizations[0].w;
    CertificateReport ok = check_boundary_close(w);
    CHECK(ok.verdict == Verdict::holds);
    REQUIRE(ok.witness_rows.size() == w.cols());
    for (index_t j = 0; j < w.cols(); ++j) CHECK(w(ok.witness_rows[j], j) == Rational(0));

    CertificateReport strict =
        check_boundary_close(w, kDefaultTol, BoundaryReading::exactly_one_zero);
    CHECK(strict.verdict == Verdict::fails);  // columns have two zeros each
    CHECK(std::find(strict.flags.begin(), strict.flags.end(), "strict-variant") !=
          strict.flags.end());

    Matrix<Rational> positive = Matrix<Rational>::from_rows({{1, 2}, {3, 4}});
    CertificateReport fail = check_boundary_close(positive);
    CHECK(fail.verdict == Verdict::fails);
    CHECK(fail.notes.find("cannot be unique") != std::string::npos);
    CHECK(fail.witness_cols == std::vector<index_t>{0, 1});
}

TEST_CASE("strongly boundary close on worked instances", "[certify]") {
    auto t1 = worked_example<Rational>("type1");
    CHECK(check_strongly_boundary_close(t1.factorizations[0].w).verdict == Verdict::fails);

    auto t2 = worked_example<Rational>("type2");
    CertificateReport ok = check_strongly_boundary_close(t2.factorizations[0].w);
    CHECK(ok.verdict == Verdict::holds);
    // Witness sets: for every row index m there is a column subset of the
    // required size on which the remaining rows are invertible.
    const Matrix<Rational>& w = t2.factorizations[0].w;
    const index_t r_count = w.cols();
    REQUIRE(ok.witness_sets.size() == r_count);
    for (index_t m = 0; m < r_count; ++m) {
        const auto& cols = ok.witness_sets[m];
        REQUIRE(cols.size() == r_count - m - 1);
        std::vector<index_t> rows;
        for (index_t i = m + 1; i < r_count; ++i) rows.push_back(i);
        for (index_t c : cols) CHECK(w(m, c) == Rational(0));
        if (!cols.empty())
            CHECK(oracle::rank_gauss(w.select_rows(rows).select_cols(cols)) == cols.size());
    }

    CHECK(check_strongly_boundary_close(Matrix<Rational>::identity(6)).verdict ==
          Verdict::holds);

    // Inner dimension above the exhaustive cap: unknown, flagged.
    CertificateReport capped = check_strongly_boundary_close(Matrix<Rational>::identity(9));
    CHECK(capped.verdict == Verdict::unknown);
    CHECK(std::find(capped.flags.begin(), capped.flags.end(), "search-cap") !=
          capped.flags.end());

    // Fewer rows than inner indices.  An all-positive short matrix already
    // fails the boundary-close part, which is a sound failure certificate
    // and takes precedence over the shape guard.
    Matrix<Rational> shortpos(2, 3, Rational(1));
    CHECK(check_strongly_boundary_close(shortpos).verdict == Verdict::fails);

    // With every column touching the boundary the shape guard is reached:
    // the nested zero pattern needs at least as many rows as inner indices,
    // so the report is unknown rather than a definite verdict.
    Matrix<Rational> shortw = Matrix<Rational>::from_rows({{0, 1, 0}, {1, 0, 2}});
    CertificateReport short_report = check_strongly_boundary_close(shortw);
    CHECK(short_report.verdict == Verdict::unknown);
    CHECK(short_report.notes.find("fewer rows") != std::string::npos);
}

TEST_CASE("support containment: violation and necessity-only demonstration", "[certify]") {
    Matrix<Rational> w = Matrix<Rational>::from_rows({{1, 1}, {0, 1}});
    Matrix<Rational> h = Matrix<Rational>::identity(2);
    HuangResult bad = check_huang(w, h);
    CHECK(bad.report.verdict == Verdict::fails);
    REQUIRE(!bad.report.violations.empty());
    CHECK(bad.report.violations.front() == std::pair<index_t, index_t>{0, 1});

    auto t2 = worked_example<Rational>("type2");
    HuangResult ok = check_huang(t2.factorizations[0].w, t2.factorizations[0].h);
    CHECK(ok.report.verdict == Verdict::holds);  // necessary only: instance is non-unique
    CHECK(ok.report.notes.find("necessary") != std::string::npos);
    using sets = std::vector<std::vector<index_t>>;
    CHECK(ok.supports.w_col_support ==
          sets{{0, 6}, {1, 6}, {2, 6}, {3}, {4}, {5}});
    CHECK(ok.supports.h_row_support ==
          sets{{0, 3, 6}, {1, 4, 7}, {2, 5, 8}, {0, 1, 2}, {3, 4, 5}, {6, 7, 8}});
}

TEST_CASE("verdicts are invariant under monomial changes of basis", "[certify]") {
    std::mt19937_64 g(20250823);
    std::uniform_int_distribution<index_t> dim(2, 6);
    for (int trial = 0; trial < 50; ++trial) {
        index_t m = dim(g), r = dim(g), n = dim(g);
        Matrix<Rational> w = oracle::random_nonneg_matrix(g, m, r, 4, 2);
        Matrix<Rational> h = oracle::random_nonneg_matrix(g, r, n, 4, 2);
        Matrix<Rational> q = oracle::random_monomial(g, r);
        Matrix<Rational> wq = w * q;
        Matrix<Rational> qih = oracle::monomial_inverse(q) * h;

        INFO("trial " << trial);
        CHECK(check_boundary_close(w).verdict == check_boundary_close(wq).verdict);
        CHECK(check_boundary_close(w, kDefaultTol, BoundaryReading::exactly_one_zero).verdict ==
              check_boundary_close(wq, kDefaultTol, BoundaryReading::exactly_one_zero).verdict);
        CHECK(check_sufficiently_spread(h).verdict == check_sufficiently_spread(qih).verdict);
        CHECK(check_huang(w, h).report.verdict == check_huang(wq, qih).report.verdict);
        if (r <= 6)
            CHECK(check_strongly_boundary_close(w).verdict ==
                  check_strongly_boundary_close(wq).verdict);
    }
}
