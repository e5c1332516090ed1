#ifndef NMFID_CORPUS_HPP
#define NMFID_CORPUS_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nmfid/io.hpp"
#include "nmfid/matrix.hpp"
#include "nmfid/solve.hpp"

namespace nmfid {

struct ExpectedOutcomes {
    std::string type_kind;  // "TypeI" / "TypeII" / "TypeIII" / empty
    std::optional<index_t> rank;
    std::optional<index_t> nonneg_rank;
    std::optional<index_t> block_count;
    std::optional<index_t> parts;
    std::optional<index_t> articulations;
};

// A benchmark instance: the target, its known exact factorizations, any
// auxiliary printed matrices (change-of-basis factors, three-factor model
// parts), and the documented expectations.
template <typename T>
struct NamedInstance {
    std::string name;
    Matrix<T> s;
    std::vector<Factorization<T>> factorizations;
    std::vector<std::pair<std::string, Matrix<T>>> extras;
    ExpectedOutcomes expected;

    const Matrix<T>& extra(const std::string& key) const {
        for (const auto& [k, v] : extras)
            if (k == key) return v;
        throw std::out_of_range("no auxiliary matrix named " + key);
    }
};

inline constexpr std::array<const char*, 5> kWorkedExampleNames = {
    "example1", "type1", "type2", "type3", "block-g"};

namespace corpus_data {

// Two-articulation family whose target also factors through itself.
inline constexpr const char* kExample1S = R"(
1,0,1,0
0,1,0,1
1,1,0,0
0,0,1,1
0,0,0,0
)";
inline constexpr const char* kExample1W = R"(
1,0,0,0
0,1,0,0
0,0,1,0
0,0,0,1
0,0,0,0
)";
inline constexpr const char* kExample1H = R"(
1,0,1,0
0,1,0,1
1,1,0,0
0,0,1,1
)";

// Same-span pair related by a non-monomial change of basis.
inline constexpr const char* kType1H = R"(
1/2,1,1,1/2,0,0
1,1/2,0,0,1/2,1
0,0,1/2,1,1,1/2
)";
inline constexpr const char* kType1Q = R"(
-1/3,2/3,2/3
2/3,-1/3,2/3
2/3,2/3,-1/3
)";

// Two factorizations whose factors span different subspaces.
inline constexpr const char* kType2S = R"(
1,0,0,1,0,0,1,0,0
0,1,0,0,1,0,0,1,0
0,0,1,0,0,1,0,0,1
1,1,1,0,0,0,0,0,0
0,0,0,1,1,1,0,0,0
0,0,0,0,0,0,1,1,1
1,1,1,1,1,1,1,1,1
)";
inline constexpr const char* kType2W1 = R"(
1,0,0,0,0,0
0,1,0,0,0,0
0,0,1,0,0,0
0,0,0,1,0,0
0,0,0,0,1,0
0,0,0,0,0,1
1,1,1,0,0,0
)";
inline constexpr const char* kType2W2 = R"(
1,0,0,0,0,0
0,1,0,0,0,0
0,0,1,0,0,0
0,0,0,1,0,0
0,0,0,0,1,0
0,0,0,0,0,1
0,0,0,1,1,1
)";
inline constexpr const char* kType2H = R"(
1,0,0,1,0,0,1,0,0
0,1,0,0,1,0,0,1,0
0,0,1,0,0,1,0,0,1
1,1,1,0,0,0,0,0,0
0,0,0,1,1,1,0,0,0
0,0,0,0,0,0,1,1,1
)";
inline constexpr const char* kType2Q = R"(
1,0,0,0,0,0,0
0,1,0,0,0,0,0
0,0,1,0,0,0,0
0,0,0,0,-1,-1,1
0,0,0,0,1,0,0
0,0,0,0,0,1,0
1,1,1,0,0,0,0
)";

// Three factorizations combining a basis change with a span change.
inline constexpr const char* kType3S = R"(
2,1,2,1
2,3,2,3
1,1,0,0
0,0,1,1
1,1,1,1
)";
inline constexpr const char* kType3W1 = R"(
2,1,0,0
2,3,0,0
0,0,1,0
0,0,0,1
1,1,0,0
)";
inline constexpr const char* kType3W2 = R"(
2,1,0,0
2,3,0,0
0,0,1,0
0,0,0,1
0,0,1,1
)";
inline constexpr const char* kType3W2p = R"(
1,0,1,1
0,1,2,2
0,0,1,0
0,0,0,1
0,0,1,1
)";
inline constexpr const char* kType3H = R"(
1,0,1,0
0,1,0,1
1,1,0,0
0,0,1,1
)";
// Row-mixing map with W1 = Q1 * W2.  The printed form omits the column
// acting on row 3; the completion inserts that zero column.
inline constexpr const char* kType3Q1 = R"(
1,0,0,0,0
0,1,0,0,0
0,0,0,-1,1
0,0,0,1,0
1/4,1/4,0,0,0
)";
inline constexpr const char* kType3Q2 = R"(
3/4,-1/4,1/4,1/4
-1/2,1/2,1/2,1/2
0,0,1,0
0,0,0,1
)";

// Three-factor model with two independent sub-models.
inline constexpr const char* kBlockG = R"(
1,2,3,2
1,3,2,3
2,1,2,2
2,1,2,3
)";
inline constexpr const char* kBlockW = R"(
1,2,0
2,1,0
1,1,0
0,0,2
)";
inline constexpr const char* kBlockH = R"(
1,2,0
2,1,0
0,0,1
)";

}  // namespace corpus_data

template <typename T>
NamedInstance<T> worked_example(const std::string& name) {
    using namespace corpus_data;
    auto mat = [](const char* csv) { return read_matrix_csv<T>(csv); };

    if (name == "example1") {
        Matrix<T> s = mat(kExample1S), w = mat(kExample1W), h = mat(kExample1H);
        NamedInstance<T> inst{name, s, {}, {}, {}};
        inst.factorizations.emplace_back(w, h);
        inst.factorizations.emplace_back(s, Matrix<T>::identity(4));
        inst.expected.type_kind = "TypeII";
        inst.expected.rank = 3;
        inst.expected.parts = 2;
        inst.expected.articulations = 2;
        return inst;
    }
    if (name == "type1") {
        Matrix<T> h = mat(kType1H);
        Matrix<T> w = h.transpose();
        Matrix<T> q = mat(kType1Q);
        Matrix<T> s = w * h;
        NamedInstance<T> inst{name, s, {}, {}, {}};
        inst.factorizations.emplace_back(w, h);
        inst.factorizations.emplace_back(w * q, q * h);  // Q is its own inverse
        inst.extras.emplace_back("Q", q);
        inst.expected.type_kind = "TypeI";
        inst.expected.rank = 3;
        inst.expected.nonneg_rank = 3;
        return inst;
    }
    if (name == "type2") {
        Matrix<T> s = mat(kType2S), w1 = mat(kType2W1), w2 = mat(kType2W2), h = mat(kType2H);
        NamedInstance<T> inst{name, s, {}, {}, {}};
        inst.factorizations.emplace_back(w1, h);
        inst.factorizations.emplace_back(w2, h);
        inst.extras.emplace_back("Q", mat(kType2Q));
        inst.expected.type_kind = "TypeII";
        inst.expected.rank = 5;
        inst.expected.nonneg_rank = 6;
        inst.expected.parts = 2;
        inst.expected.articulations = 3;
        return inst;
    }
    if (name == "type3") {
        Matrix<T> s = mat(kType3S);
        Matrix<T> w1 = mat(kType3W1), w2 = mat(kType3W2), w2p = mat(kType3W2p);
        Matrix<T> h = mat(kType3H);
        NamedInstance<T> inst{name, s, {}, {}, {}};
        inst.factorizations.emplace_back(w2, h);
        inst.factorizations.emplace_back(w2p, h);
        inst.factorizations.emplace_back(w1, h);
        inst.extras.emplace_back("Q1", mat(kType3Q1));
        inst.extras.emplace_back("Q2", mat(kType3Q2));
        inst.expected.type_kind = "TypeIII";
        inst.expected.rank = 3;
        return inst;
    }
    if (name == "block-g") {
        Matrix<T> g = mat(kBlockG), w = mat(kBlockW), h = mat(kBlockH);
        Matrix<T> s = g * (w * h);
        NamedInstance<T> inst{name, s, {}, {}, {}};
        inst.factorizations.emplace_back(g * w, h);
        inst.extras.emplace_back("G", g);
        inst.extras.emplace_back("W", w);
        inst.extras.emplace_back("H", h);
        inst.expected.rank = 3;
        inst.expected.nonneg_rank = 3;
        inst.expected.block_count = 2;
        return inst;
    }
    throw std::invalid_argument("unknown instance name: " + name);
}

// ---------------------------------------------------------------------------
// Swimmer: 256 binary 32x32 frames, one per combination of four limbs in
// four poses each, flattened row-major into the columns of a 1024 x 256
// matrix.  Fixed geometry: a 2x8 torso bar; each limb is a 6-pixel straight
// ray from a torso corner in one of four outward directions.  Limb-pose
// pixel sets are pairwise disjoint and disjoint from the torso (validated
// at generation time).  With the body enabled, the torso pixels ride on
// every articulation column of part 1, so each frame shows it exactly once.
// ---------------------------------------------------------------------------

namespace swimmer_detail {

inline constexpr index_t kGrid = 32;
inline constexpr index_t kParts = 4;
inline constexpr index_t kArts = 4;
inline constexpr index_t kRayLen = 6;

struct Px {
    index_t row, col;
    index_t flat() const { return row * kGrid + col; }
};

inline std::vector<Px> torso_pixels() {
    std::vector<Px> out;
    for (index_t r = 11; r <= 18; ++r)
        for (index_t c = 14; c <= 15; ++c) out.push_back({r, c});
    return out;
}

// Anchor per limb and its four ray directions (dr, dc).
struct Limb {
    int ar, ac;
    std::array<std::pair<int, int>, kArts> dirs;
};

inline const std::array<Limb, kParts>& limbs() {
    static const std::array<Limb, kParts> l = {{
        {11, 13, {{{0, -1}, {-1, -1}, {-1, 0}, {1, -1}}}},  // top-left
        {11, 16, {{{0, 1}, {-1, 1}, {-1, 0}, {1, 1}}}},     // top-right
        {18, 13, {{{0, -1}, {1, -1}, {1, 0}, {-1, -1}}}},   // bottom-left
        {18, 16, {{{0, 1}, {1, 1}, {1, 0}, {-1, 1}}}},      // bottom-right
    }};
    return l;
}

inline std::vector<Px> pose_pixels(index_t part, index_t art) {
    const Limb& limb = limbs()[part];
    auto [dr, dc] = limb.dirs[art];
    std::vector<Px> out;
    for (index_t k = 1; k <= kRayLen; ++k) {
        int r = limb.ar + dr * static_cast<int>(k);
        int c = limb.ac + dc * static_cast<int>(k);
        if (r < 0 || c < 0 || r >= static_cast<int>(kGrid) || c >= static_cast<int>(kGrid))
            throw std::logic_error("swimmer ray leaves the grid");
        out.push_back({static_cast<index_t>(r), static_cast<index_t>(c)});
    }
    return out;
}

}  // namespace swimmer_detail

// Base-4 articulation code of frame j (part 1 is the leading digit); used
// for file naming and column bookkeeping.
inline std::string swimmer_code(index_t frame) {
    std::string code(swimmer_detail::kParts, '0');
    for (index_t p = swimmer_detail::kParts; p-- > 0;) {
        code[p] = static_cast<char>('0' + frame % swimmer_detail::kArts);
        frame /= swimmer_detail::kArts;
    }
    return code;
}

template <typename T>
NamedInstance<T> swimmer(bool with_body) {
    using namespace swimmer_detail;
    const index_t pixels = kGrid * kGrid;
    const index_t r_count = kParts * kArts;
    const index_t frames = 256;

    // Disjointness validation across all pose pixel sets and the torso.
    std::vector<int> owner(pixels, -1);
    auto claim = [&](const std::vector<Px>& px, int id) {
        for (const Px& p : px) {
            if (owner[p.flat()] != -1) throw std::logic_error("swimmer pixel sets overlap");
            owner[p.flat()] = id;
        }
    };
    claim(torso_pixels(), 100);
    for (index_t p = 0; p < kParts; ++p)
        for (index_t a = 0; a < kArts; ++a) claim(pose_pixels(p, a), static_cast<int>(p * kArts + a));

    Matrix<T> w(pixels, r_count);
    for (index_t p = 0; p < kParts; ++p)
        for (index_t a = 0; a < kArts; ++a) {
            index_t r = p * kArts + a;
            for (const Px& px : pose_pixels(p, a)) w(px.flat(), r) = T(1);
            if (with_body && p == 0)
                for (const Px& px : torso_pixels()) w(px.flat(), r) = T(1);
        }

    Matrix<T> h(r_count, frames);
    for (index_t j = 0; j < frames; ++j) {
        index_t rem = j;
        for (index_t p = kParts; p-- > 0;) {
            index_t a = rem % kArts;
            rem /= kArts;
            h(p * kArts + a, j) = T(1);
        }
    }

    NamedInstance<T> inst{with_body ? "swimmer" : "swimmer-no-body", w * h, {}, {}, {}};
    inst.factorizations.emplace_back(std::move(w), std::move(h));
    inst.expected.parts = kParts;
    inst.expected.articulations = kArts;
    inst.expected.nonneg_rank = r_count;
    if (!with_body) inst.expected.rank = 13;  // P*(A-1) + 1
    if (with_body) inst.expected.type_kind = "TypeII";
    return inst;
}

// Reshape one flattened frame back into a 32x32 image (for PGM export).
template <typename T>
Matrix<double> swimmer_frame_image(const Matrix<T>& s, index_t frame) {
    using namespace swimmer_detail;
    if (s.rows() != kGrid * kGrid || frame >= s.cols())
        throw std::invalid_argument("not a swimmer data column");
    Matrix<double> img(kGrid, kGrid);
    for (index_t r = 0; r < kGrid; ++r)
        for (index_t c = 0; c < kGrid; ++c) img(r, c) = to_double(s(r * kGrid + c, frame));
    return img;
}

}  // namespace nmfid

#endif  // NMFID_CORPUS_HPP
