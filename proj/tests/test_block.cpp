// Block structure: finest simultaneous decomposition of (W, H), the
// direct-sum split of a three-factor model, exact reassembly, and the
// per-block identifiability verdicts.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "nmfid/block.hpp"
#include "nmfid/corpus.hpp"
#include "oracles.hpp"

using namespace nmfid;

namespace {

// Strictly diagonally dominant nonnegative square matrix: always invertible,
// hence always an admissible mixing factor.
Matrix<Rational> random_mixing(std::mt19937_64& g, index_t n) {
    auto m = oracle::random_nonneg_matrix(g, n, n);
    for (index_t i = 0; i < n; ++i) {
        Rational row_sum(0);
        for (index_t j = 0; j < n; ++j) row_sum += m(i, j);
        m(i, i) = row_sum + Rational(1);
    }
    return m;
}

std::vector<index_t> random_permutation(std::mt19937_64& g, index_t n) {
    std::vector<index_t> p(n);
    std::iota(p.begin(), p.end(), index_t{0});
    std::shuffle(p.begin(), p.end(), g);
    return p;
}

}  // namespace

TEST_CASE("mixed benchmark model splits into two sub-models", "[block]") {
    auto inst = worked_example<Rational>("block-g");
    BlockModel<Rational> m(inst.extra("G"), inst.extra("W"), inst.extra("H"));
    auto d = find_block_structure(m.w, m.h);

    REQUIRE(d.block_count() == 2);
    REQUIRE(d.compatibility_ok);
    REQUIRE(d.compatibility_notes.empty());
    REQUIRE(d.blocks[0].w_rows == std::vector<index_t>{0, 1, 2});
    REQUIRE(d.blocks[0].inner == std::vector<index_t>{0, 1});
    REQUIRE(d.blocks[0].h_cols == std::vector<index_t>{0, 1});
    REQUIRE(d.blocks[1].w_rows == std::vector<index_t>{3});
    REQUIRE(d.blocks[1].inner == std::vector<index_t>{2});
    REQUIRE(d.blocks[1].h_cols == std::vector<index_t>{2});
    REQUIRE(d.inner_permutation == std::vector<index_t>{0, 1, 2});

    auto subs = direct_sum_decompose(m, d);
    REQUIRE(subs.size() == 2);
    REQUIRE(subs[0].w.rows() == 3);
    REQUIRE(subs[0].w.cols() == 2);
    REQUIRE(subs[1].w.rows() == 1);
    REQUIRE(subs[1].w.cols() == 1);
    // Every sub-model keeps all four outer rows through its slice of G.
    REQUIRE(subs[0].g.rows() == 4);
    REQUIRE(subs[1].g.rows() == 4);

    auto rebuilt = reassemble(m, d, subs);
    REQUIRE((rebuilt - m.product()).max_abs() == Rational(0));
    Matrix<Rational> expected =
        read_matrix_csv<Rational>("22,23,4\n23,25,6\n20,19,4\n20,19,6\n");
    REQUIRE((rebuilt - expected).max_abs() == Rational(0));
    REQUIRE((inst.s - expected).max_abs() == Rational(0));
}

TEST_CASE("the mixed product itself shows no block structure", "[block]") {
    // The split lives in the factors; the assembled matrix is dense and its
    // own incidence graph is a single component.
    auto inst = worked_example<Rational>("block-g");
    auto d = find_block_structure(inst.s, Matrix<Rational>::identity(inst.s.cols()));
    REQUIRE(d.block_count() == 1);
}

TEST_CASE("per-block verdicts on the mixed benchmark", "[block]") {
    auto inst = worked_example<Rational>("block-g");
    BlockModel<Rational> m(inst.extra("G"), inst.extra("W"), inst.extra("H"));
    auto d = find_block_structure(m.w, m.h);
    auto report = blockwise_identifiability(m, d);

    REQUIRE(report.per_block.size() == 2);
    REQUIRE(report.per_block[0].verdict == IdentifiabilityVerdict::non_identifiable);
    REQUIRE(report.per_block[0].reason.find("boundary-close") != std::string::npos);
    REQUIRE(report.per_block[0].certificates.size() == 4);
    REQUIRE(report.per_block[1].verdict == IdentifiabilityVerdict::unique);
    REQUIRE(report.per_block[1].reason.find("single generator") != std::string::npos);
    REQUIRE(report.aggregate == IdentifiabilityVerdict::non_identifiable);
    REQUIRE(std::string(to_string(report.aggregate)) == "non-identifiable");
}

TEST_CASE("planted direct sums are recovered exactly", "[block]") {
    std::mt19937_64 g(501);
    for (int trial = 0; trial < 50; ++trial) {
        const index_t k_count = 1 + static_cast<index_t>(g() % 4);
        std::vector<index_t> t_sizes, r_sizes, n_sizes;
        index_t t_total = 0, r_total = 0, n_total = 0;
        for (index_t k = 0; k < k_count; ++k) {
            t_sizes.push_back(1 + g() % 3);
            r_sizes.push_back(1 + g() % 3);
            n_sizes.push_back(1 + g() % 3);
            t_total += t_sizes[k];
            r_total += r_sizes[k];
            n_total += n_sizes[k];
        }
        auto row_perm = random_permutation(g, t_total);
        auto inner_perm = random_permutation(g, r_total);
        auto col_perm = random_permutation(g, n_total);

        // Scatter each strictly positive (hence connected) block through the
        // permutations and remember which global indices it owns.
        Matrix<Rational> w(t_total, r_total), h(r_total, n_total);
        std::vector<std::vector<index_t>> rows_of(k_count), inner_of(k_count), cols_of(k_count);
        index_t t_base = 0, r_base = 0, n_base = 0;
        for (index_t k = 0; k < k_count; ++k) {
            for (index_t i = 0; i < t_sizes[k]; ++i) rows_of[k].push_back(row_perm[t_base + i]);
            for (index_t r = 0; r < r_sizes[k]; ++r)
                inner_of[k].push_back(inner_perm[r_base + r]);
            for (index_t n = 0; n < n_sizes[k]; ++n) cols_of[k].push_back(col_perm[n_base + n]);
            for (index_t i = 0; i < t_sizes[k]; ++i)
                for (index_t r = 0; r < r_sizes[k]; ++r)
                    w(rows_of[k][i], inner_of[k][r]) = oracle::random_positive_rational(g);
            for (index_t r = 0; r < r_sizes[k]; ++r)
                for (index_t n = 0; n < n_sizes[k]; ++n)
                    h(inner_of[k][r], cols_of[k][n]) = oracle::random_positive_rational(g);
            std::sort(rows_of[k].begin(), rows_of[k].end());
            std::sort(inner_of[k].begin(), inner_of[k].end());
            std::sort(cols_of[k].begin(), cols_of[k].end());
            t_base += t_sizes[k];
            r_base += r_sizes[k];
            n_base += n_sizes[k];
        }

        BlockModel<Rational> m(random_mixing(g, t_total), w, h);
        auto d = find_block_structure(m.w, m.h);
        REQUIRE(d.block_count() == k_count);
        REQUIRE(d.compatibility_ok);

        // Match found blocks to planted ones by their inner sets; all three
        // index sets must agree.
        for (const Block& b : d.blocks) {
            bool matched = false;
            for (index_t k = 0; k < k_count; ++k) {
                if (b.inner != inner_of[k]) continue;
                REQUIRE(b.w_rows == rows_of[k]);
                REQUIRE(b.h_cols == cols_of[k]);
                matched = true;
                break;
            }
            REQUIRE(matched);
        }

        auto perm = d.inner_permutation;
        std::sort(perm.begin(), perm.end());
        std::vector<index_t> iota(r_total);
        std::iota(iota.begin(), iota.end(), index_t{0});
        REQUIRE(perm == iota);

        auto subs = direct_sum_decompose(m, d);
        REQUIRE((reassemble(m, d, subs) - m.product()).max_abs() == Rational(0));
    }
}

TEST_CASE("spread plus strongly-boundary-close block certifies unique", "[block]") {
    // W = I with an appended positive row, H = [I | 1]: every necessary and
    // sufficient criterion lines up, so the block is decided unique.
    const index_t r_count = 3;
    Matrix<Rational> w(r_count + 1, r_count);
    for (index_t r = 0; r < r_count; ++r) {
        w(r, r) = Rational(1);
        w(r_count, r) = Rational(2);
    }
    Matrix<Rational> h(r_count, r_count + 1);
    for (index_t r = 0; r < r_count; ++r) {
        h(r, r) = Rational(1);
        h(r, r_count) = Rational(1);
    }
    BlockModel<Rational> m(Matrix<Rational>::identity(r_count + 1), w, h);
    auto analysis = analyze_block(m, 0);
    REQUIRE(analysis.verdict == IdentifiabilityVerdict::unique);
    REQUIRE(analysis.reason.find("sufficiently spread") != std::string::npos);
}

TEST_CASE("separable family with an invariant row marks the block non-identifiable",
          "[block]") {
    std::mt19937_64 g(502);
    auto inst = oracle::random_sfa(g, 2, 3, /*extra=*/2, /*force_invariant_row=*/true);
    BlockModel<Rational> m(Matrix<Rational>::identity(inst.w.rows()), inst.w, inst.h);
    auto analysis = analyze_block(m, 0);
    REQUIRE(analysis.verdict == IdentifiabilityVerdict::non_identifiable);
    REQUIRE(analysis.reason.find("separable family") != std::string::npos);
    REQUIRE(analysis.reason.find("redistributed") != std::string::npos);
}

TEST_CASE("separable family without invariant rows is decided by articulation count",
          "[block]") {
    std::mt19937_64 g(503);
    SECTION("three articulations settle uniqueness") {
        auto inst = oracle::random_sfa(g, 2, 3, /*extra=*/2, /*force_invariant_row=*/false);
        BlockModel<Rational> m(Matrix<Rational>::identity(inst.w.rows()), inst.w, inst.h);
        auto analysis = analyze_block(m, 0);
        REQUIRE(analysis.verdict == IdentifiabilityVerdict::unique);
        REQUIRE(analysis.reason.find("redistribution criterion") != std::string::npos);
    }
    SECTION("two articulations stay inconclusive") {
        auto inst = oracle::random_sfa(g, 2, 2, /*extra=*/2, /*force_invariant_row=*/false);
        BlockModel<Rational> m(Matrix<Rational>::identity(inst.w.rows()), inst.w, inst.h);
        auto analysis = analyze_block(m, 0);
        REQUIRE(analysis.verdict == IdentifiabilityVerdict::unknown);
        REQUIRE(analysis.reason.find("two-articulation") != std::string::npos);
    }
}

TEST_CASE("aggregate verdict combines per-block outcomes honestly", "[block]") {
    // One inconclusive block alongside one trivially unique block: the whole
    // model must remain undecided rather than claimed unique.
    std::mt19937_64 g(504);
    auto sfa = oracle::random_sfa(g, 2, 2, /*extra=*/1, /*force_invariant_row=*/false);
    const index_t t1 = sfa.w.rows(), r1 = sfa.w.cols(), n1 = sfa.h.cols();
    Matrix<Rational> w(t1 + 1, r1 + 1), h(r1 + 1, n1 + 1);
    for (index_t i = 0; i < t1; ++i)
        for (index_t r = 0; r < r1; ++r) w(i, r) = sfa.w(i, r);
    for (index_t r = 0; r < r1; ++r)
        for (index_t n = 0; n < n1; ++n) h(r, n) = sfa.h(r, n);
    w(t1, r1) = Rational(3);
    h(r1, n1) = Rational(5);

    BlockModel<Rational> m(Matrix<Rational>::identity(t1 + 1), w, h);
    auto report = blockwise_identifiability(m, find_block_structure(w, h));
    REQUIRE(report.per_block.size() == 2);
    REQUIRE(report.per_block[0].verdict == IdentifiabilityVerdict::unknown);
    REQUIRE(report.per_block[1].verdict == IdentifiabilityVerdict::unique);
    REQUIRE(report.aggregate == IdentifiabilityVerdict::unknown);
}

TEST_CASE("model and decomposition validation", "[block]") {
    SECTION("mixing factor must have full column rank") {
        Matrix<Rational> g_bad(3, 2);
        g_bad(0, 0) = g_bad(0, 1) = Rational(1);
        g_bad(1, 0) = g_bad(1, 1) = Rational(2);
        REQUIRE_THROWS_AS(BlockModel<Rational>(g_bad, Matrix<Rational>::identity(2),
                                               Matrix<Rational>::identity(2)),
                          std::invalid_argument);
    }
    SECTION("negative factor entries are rejected") {
        Matrix<Rational> w(2, 2);
        w(0, 0) = Rational(1);
        w(1, 1) = Rational(-1);
        REQUIRE_THROWS_AS(BlockModel<Rational>(Matrix<Rational>::identity(2), w,
                                               Matrix<Rational>::identity(2)),
                          std::invalid_argument);
    }
    SECTION("mismatched shapes are rejected") {
        REQUIRE_THROWS_AS(BlockModel<Rational>(Matrix<Rational>::identity(2),
                                               Matrix<Rational>::identity(3),
                                               Matrix<Rational>::identity(3)),
                          std::invalid_argument);
    }
    SECTION("a block with an empty axis cannot be split off") {
        // Zero inner column: its component holds no W row at all.
        Matrix<Rational> w(2, 2);
        w(0, 0) = w(1, 0) = Rational(1);
        BlockModel<Rational> m(Matrix<Rational>::identity(2), w,
                               Matrix<Rational>::identity(2));
        auto d = find_block_structure(m.w, m.h);
        REQUIRE_THROWS_AS(direct_sum_decompose(m, d), std::invalid_argument);
    }
    SECTION("reassembly checks the sub-model count") {
        auto inst = worked_example<Rational>("block-g");
        BlockModel<Rational> m(inst.extra("G"), inst.extra("W"), inst.extra("H"));
        auto d = find_block_structure(m.w, m.h);
        auto subs = direct_sum_decompose(m, d);
        subs.pop_back();
        REQUIRE_THROWS_AS(reassemble(m, d, subs), std::invalid_argument);
    }
}
