// Built-in benchmark instances: frozen shapes, ranks, auxiliary relations,
// and the articulated image family's geometry.

#include <catch2/catch_amalgamated.hpp>

#include "nmfid/classify.hpp"
#include "nmfid/corpus.hpp"
#include "nmfid/linalg.hpp"

using namespace nmfid;

TEST_CASE("benchmark catalog shapes and expectations are frozen", "[corpus]") {
    struct Row {
        const char* name;
        index_t rows, cols, members;
        index_t expected_rank;
    };
    const Row table[] = {
        {"example1", 5, 4, 2, 3}, {"type1", 6, 6, 2, 3},  {"type2", 7, 9, 2, 5},
        {"type3", 5, 4, 3, 3},    {"block-g", 4, 3, 1, 3},
    };
    for (const Row& row : table) {
        auto inst = worked_example<Rational>(row.name);
        INFO(row.name);
        REQUIRE(inst.name == row.name);
        REQUIRE(inst.s.rows() == row.rows);
        REQUIRE(inst.s.cols() == row.cols);
        REQUIRE(inst.factorizations.size() == row.members);
        REQUIRE(inst.expected.rank.has_value());
        REQUIRE(*inst.expected.rank == row.expected_rank);
        REQUIRE(rank(inst.s) == row.expected_rank);
        for (const auto& f : inst.factorizations) {
            REQUIRE(residual_fro_sq(inst.s, f) == Rational(0));
            REQUIRE(f.w.all_nonneg());
            REQUIRE(f.h.all_nonneg());
        }
    }
    REQUIRE_THROWS_AS(worked_example<Rational>("no-such-instance"), std::invalid_argument);
}

TEST_CASE("expected classification labels are stored where known", "[corpus]") {
    REQUIRE(worked_example<Rational>("example1").expected.type_kind == "TypeII");
    REQUIRE(worked_example<Rational>("type1").expected.type_kind == "TypeI");
    REQUIRE(worked_example<Rational>("type2").expected.type_kind == "TypeII");
    REQUIRE(worked_example<Rational>("type3").expected.type_kind == "TypeIII");
    REQUIRE(worked_example<Rational>("block-g").expected.type_kind.empty());
    REQUIRE(*worked_example<Rational>("type2").expected.nonneg_rank == 6);
    REQUIRE(*worked_example<Rational>("block-g").expected.block_count == 2);
}

TEST_CASE("auxiliary matrices satisfy their defining relations", "[corpus]") {
    SECTION("same-span pair: the recorded involution") {
        auto inst = worked_example<Rational>("type1");
        const auto& q = inst.extra("Q");
        REQUIRE((q * q - Matrix<Rational>::identity(3)).max_abs() == Rational(0));
        REQUIRE((inst.factorizations[0].w * q - inst.factorizations[1].w).max_abs() ==
                Rational(0));
        REQUIRE((q * inst.factorizations[0].h - inst.factorizations[1].h).max_abs() ==
                Rational(0));
        REQUIRE_FALSE(is_monomial(q));
        REQUIRE_FALSE(q.all_nonneg());
    }
    SECTION("span-changing pair: the recorded row-mixing map") {
        auto inst = worked_example<Rational>("type2");
        const auto& q = inst.extra("Q");
        REQUIRE(q.rows() == 7);
        REQUIRE(q.cols() == 7);
        REQUIRE((q * inst.factorizations[1].w - inst.factorizations[0].w).max_abs() ==
                Rational(0));
    }
    SECTION("three-member set: both recorded maps") {
        auto inst = worked_example<Rational>("type3");
        const auto& w2 = inst.factorizations[0].w;
        const auto& w2p = inst.factorizations[1].w;
        const auto& w1 = inst.factorizations[2].w;
        REQUIRE((inst.extra("Q1") * w2 - w1).max_abs() == Rational(0));
        REQUIRE((w2 * inst.extra("Q2") - w2p).max_abs() == Rational(0));
        REQUIRE(column_space_equal(w2, w2p));
        REQUIRE_FALSE(column_space_equal(w2, w1));
    }
    SECTION("mixed model: the three stored factors rebuild both views") {
        auto inst = worked_example<Rational>("block-g");
        const auto& g = inst.extra("G");
        const auto& w = inst.extra("W");
        const auto& h = inst.extra("H");
        REQUIRE((g * (w * h) - inst.s).max_abs() == Rational(0));
        REQUIRE((inst.factorizations[0].w - g * w).max_abs() == Rational(0));
        REQUIRE(rank(g) == 4);
    }
    SECTION("missing keys are reported") {
        REQUIRE_THROWS_AS(worked_example<Rational>("type1").extra("nope"), std::out_of_range);
    }
}

TEST_CASE("articulated image family has the frozen geometry", "[corpus]") {
    auto body = swimmer<Rational>(true);
    auto plain = swimmer<Rational>(false);

    for (const auto* inst : {&body, &plain}) {
        REQUIRE(inst->s.rows() == 1024);
        REQUIRE(inst->s.cols() == 256);
        REQUIRE(inst->factorizations.size() == 1);
        REQUIRE(inst->factorizations[0].w.cols() == 16);
        REQUIRE(inst->factorizations[0].h.rows() == 16);
        REQUIRE(residual_fro_sq(inst->s, inst->factorizations[0]) == Rational(0));
        REQUIRE(*inst->expected.parts == 4);
        REQUIRE(*inst->expected.articulations == 4);
        REQUIRE(*inst->expected.nonneg_rank == 16);
    }
    REQUIRE(body.name == "swimmer");
    REQUIRE(plain.name == "swimmer-no-body");
    REQUIRE(body.expected.type_kind == "TypeII");
    REQUIRE(plain.expected.type_kind.empty());
    REQUIRE(*plain.expected.rank == 13);
    REQUIRE_FALSE(body.expected.rank.has_value());
}

TEST_CASE("every frame activates one articulation per limb", "[corpus]") {
    auto inst = swimmer<Rational>(false);
    const auto& h = inst.factorizations[0].h;
    for (index_t j = 0; j < 256; ++j) {
        std::string code = swimmer_code(j);
        REQUIRE(code.size() == 4);
        for (index_t p = 0; p < 4; ++p) {
            index_t digit = static_cast<index_t>(code[p] - '0');
            REQUIRE(digit < 4);
            // Exactly the coded articulation row of this limb is active.
            for (index_t a = 0; a < 4; ++a)
                REQUIRE(h(p * 4 + a, j) == (a == digit ? Rational(1) : Rational(0)));
        }
    }
    REQUIRE(swimmer_code(0) == "0000");
    REQUIRE(swimmer_code(255) == "3333");
    REQUIRE(swimmer_code(6) == "0012");
    REQUIRE(swimmer_code(228) == "3210");
}

TEST_CASE("limb rays are disjoint and frames have the expected mass", "[corpus]") {
    auto body = swimmer<Rational>(true);
    auto plain = swimmer<Rational>(false);

    // Without the body every frame lights 4 limbs x 6 ray pixels; the body
    // adds a constant 16-pixel bar.
    for (index_t j = 0; j < 256; ++j) {
        Rational plain_sum(0), body_sum(0);
        for (index_t i = 0; i < 1024; ++i) {
            plain_sum += plain.s(i, j);
            body_sum += body.s(i, j);
            REQUIRE((plain.s(i, j) == Rational(0) || plain.s(i, j) == Rational(1)));
            REQUIRE((body.s(i, j) == Rational(0) || body.s(i, j) == Rational(1)));
        }
        REQUIRE(plain_sum == Rational(24));
        REQUIRE(body_sum == Rational(40));
    }

    // The two variants differ exactly on the 2x8 torso bar, which is on in
    // every frame of the body variant.
    index_t differing_rows = 0;
    for (index_t i = 0; i < 1024; ++i) {
        bool differs = false;
        for (index_t j = 0; j < 256; ++j)
            if (body.s(i, j) != plain.s(i, j)) differs = true;
        if (!differs) continue;
        ++differing_rows;
        index_t r = i / 32, c = i % 32;
        REQUIRE((r >= 11 && r <= 18));
        REQUIRE((c >= 14 && c <= 15));
        for (index_t j = 0; j < 256; ++j) {
            REQUIRE(body.s(i, j) == Rational(1));
            REQUIRE(plain.s(i, j) == Rational(0));
        }
    }
    REQUIRE(differing_rows == 16);
}

TEST_CASE("both image variants have linear rank 13", "[corpus]") {
    REQUIRE(rank(swimmer<Rational>(false).s) == 13);
    REQUIRE(rank(swimmer<Rational>(true).s) == 13);
}

TEST_CASE("generation is deterministic", "[corpus]") {
    auto a = swimmer<Rational>(true);
    auto b = swimmer<Rational>(true);
    REQUIRE((a.s - b.s).max_abs() == Rational(0));
    REQUIRE((a.factorizations[0].w - b.factorizations[0].w).max_abs() == Rational(0));
    REQUIRE((a.factorizations[0].h - b.factorizations[0].h).max_abs() == Rational(0));
}

TEST_CASE("frame images reshape the data columns", "[corpus]") {
    auto inst = swimmer<Rational>(true);
    auto img = swimmer_frame_image(inst.s, 27);
    REQUIRE(img.rows() == 32);
    REQUIRE(img.cols() == 32);
    for (index_t r = 0; r < 32; ++r)
        for (index_t c = 0; c < 32; ++c)
            REQUIRE(img(r, c) == to_double(inst.s(r * 32 + c, 27)));
    // Torso bar present in every body frame.
    for (index_t r = 11; r <= 18; ++r)
        for (index_t c = 14; c <= 15; ++c) REQUIRE(img(r, c) == 1.0);

    REQUIRE_THROWS_AS(swimmer_frame_image(inst.s, 256), std::invalid_argument);
    REQUIRE_THROWS_AS(swimmer_frame_image(Matrix<Rational>(3, 3), 0),
                      std::invalid_argument);
}
