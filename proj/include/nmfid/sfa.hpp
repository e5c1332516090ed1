#ifndef NMFID_SFA_HPP
#define NMFID_SFA_HPP

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nmfid/certify.hpp"
#include "nmfid/matrix.hpp"
#include "nmfid/solve.hpp"

namespace nmfid {

// Recognized separable factorial articulation structure of a factorization:
// the part/articulation indexing, the detector rows, and the split of W's
// rows into the detector core and the remaining (redistributable) rows.
struct SfaCertificate {
    PartArticulationIndexing indexing;
    SeparabilityWitness witness;
    bool binary_h = false;              // H entries all 0 or 1
    std::vector<index_t> core_rows;     // detector rows, ordered by inner index
    std::vector<index_t> extra_rows;    // all other rows of W
    std::vector<std::string> flags;     // e.g. "A=2"
};

// A row of W that is strictly positive across every articulation of one
// part; its minimum epsilon over that part can be redistributed to other
// parts without changing the product.
template <typename T>
struct InvariantRowRecord {
    index_t row = 0;   // row index of W
    index_t part = 0;  // the part with entirely positive entries
    T epsilon{0};      // min over that part's articulation entries, > 0
    std::vector<T> v;  // the full row
};

template <typename T>
struct SolutionFamily {
    Factorization<T> base;
    PartArticulationIndexing indexing;
    std::vector<InvariantRowRecord<T>> records;
};

// ---------------------------------------------------------------------------
// Recognizer.  Articulations of the same part never share a column of H,
// while articulations of different parts must (complete sampling), so the
// parts are recovered as the classes of the never-co-occurs relation; the
// relation must actually be an equivalence with P classes of size A, every
// inner index needs a dedicated detector row in W, and the factorial
// sampling check must pass.  The lexicographically smallest indexing is
// returned: parts ordered by smallest inner index, articulations ascending.
// ---------------------------------------------------------------------------

template <typename T>
std::optional<SfaCertificate> detect_sfa(const Factorization<T>& f, index_t parts,
                                         index_t articulations, double tol = kDefaultTol) {
    if (parts < 1 || articulations < 1)
        throw std::invalid_argument("parts and articulations must be >= 1");
    if (f.inner_rank() != parts * articulations)
        throw std::invalid_argument("inner rank must equal parts * articulations");
    double combos = 1.0;
    for (index_t p = 0; p < parts; ++p) {
        combos *= static_cast<double>(articulations);
        if (combos > static_cast<double>(kFactorialSamplingGuard))
            throw CombinatorialLimitError("A^P exceeds the enumeration guard of 10^6");
    }
    const index_t r_count = f.inner_rank();

    // Detector rows: one row per inner index whose support is exactly {r}.
    std::vector<std::vector<index_t>> w_rows = detail::row_supports(f.w, tol);
    std::vector<index_t> detector_for(r_count, f.w.rows());
    for (index_t m = 0; m < f.w.rows(); ++m)
        if (w_rows[m].size() == 1 && detector_for[w_rows[m][0]] == f.w.rows())
            detector_for[w_rows[m][0]] = m;
    for (index_t r = 0; r < r_count; ++r)
        if (detector_for[r] == f.w.rows()) return std::nullopt;

    // Pairwise co-occurrence of inner indices in the columns of H.
    std::vector<std::vector<index_t>> h_cols = detail::column_supports(f.h, tol);
    std::vector<std::vector<bool>> co(r_count, std::vector<bool>(r_count, false));
    for (const auto& support : h_cols)
        for (index_t a = 0; a < support.size(); ++a)
            for (index_t b = a + 1; b < support.size(); ++b)
                co[support[a]][support[b]] = co[support[b]][support[a]] = true;

    // Group never-co-occurring indices and validate the grouping.
    std::vector<index_t> parent(r_count);
    std::iota(parent.begin(), parent.end(), index_t{0});
    auto find = [&](index_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (index_t r = 0; r < r_count; ++r)
        for (index_t s = r + 1; s < r_count; ++s)
            if (!co[r][s]) {
                index_t a = find(r), b = find(s);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
    std::vector<std::vector<index_t>> groups;
    std::vector<index_t> group_of_root(r_count, r_count);
    for (index_t r = 0; r < r_count; ++r) {
        index_t root = find(r);
        if (group_of_root[root] == r_count) {
            group_of_root[root] = groups.size();
            groups.emplace_back();
        }
        groups[group_of_root[root]].push_back(r);
    }
    if (groups.size() != parts) return std::nullopt;
    for (const auto& g : groups) {
        if (g.size() != articulations) return std::nullopt;
        for (index_t a = 0; a < g.size(); ++a)
            for (index_t b = a + 1; b < g.size(); ++b)
                if (co[g[a]][g[b]]) return std::nullopt;  // not an equivalence
    }

    std::vector<std::pair<index_t, index_t>> pa_of_r(r_count);
    for (index_t p = 0; p < groups.size(); ++p)
        for (index_t a = 0; a < groups[p].size(); ++a) pa_of_r[groups[p][a]] = {p, a};
    PartArticulationIndexing idx(parts, articulations, std::move(pa_of_r));

    if (check_complete_factorial_sampling(f.h, idx, tol).verdict != Verdict::holds)
        return std::nullopt;
    SeparabilityResult sep = check_separability(f.w, idx, tol);
    if (sep.report.verdict != Verdict::holds || !sep.witness) return std::nullopt;

    SfaCertificate cert{std::move(idx), std::move(*sep.witness)};
    for (index_t r = 0; r < r_count; ++r) cert.core_rows.push_back(detector_for[r]);
    std::vector<bool> is_core(f.w.rows(), false);
    for (index_t m : cert.core_rows) is_core[m] = true;
    for (index_t m = 0; m < f.w.rows(); ++m)
        if (!is_core[m]) cert.extra_rows.push_back(m);

    cert.binary_h = true;
    double thr_h = support_threshold(f.h, tol);
    for (index_t i = 0; i < f.h.rows() && cert.binary_h; ++i)
        for (index_t j = 0; j < f.h.cols() && cert.binary_h; ++j) {
            const T& v = f.h(i, j);
            if constexpr (is_exact_v<T>) {
                if (v != T(0) && v != T(1)) cert.binary_h = false;
            } else {
                double x = to_double(v);
                if (std::fabs(x) > thr_h && std::fabs(x - 1.0) > tol * (1.0 + 1.0))
                    cert.binary_h = false;
            }
        }
    if (articulations == 2) cert.flags.push_back("A=2");
    return cert;
}

// ---------------------------------------------------------------------------
// Invariant rows and the redistribution family.
// ---------------------------------------------------------------------------

template <typename T>
std::vector<InvariantRowRecord<T>> find_invariant_rows(const Factorization<T>& f,
                                                       const SfaCertificate& cert,
                                                       double tol = kDefaultTol) {
    std::vector<InvariantRowRecord<T>> records;
    double thr = support_threshold(f.w, tol);
    for (index_t m : cert.extra_rows) {
        for (index_t p = 0; p < cert.indexing.parts(); ++p) {
            bool all_positive = true;
            T eps(0);
            for (index_t a = 0; a < cert.indexing.articulations(); ++a) {
                const T& v = f.w(m, cert.indexing.r_of(p, a));
                if (!entry_nonzero(v, thr)) {
                    all_positive = false;
                    break;
                }
                if (a == 0 || v < eps) eps = v;
            }
            if (!all_positive) continue;
            InvariantRowRecord<T> rec;
            rec.row = m;
            rec.part = p;
            rec.epsilon = eps;
            rec.v = f.w.row(m);
            records.push_back(std::move(rec));
        }
    }
    return records;
}

template <typename T>
struct Type2Evidence {
    bool non_identifiable = false;
    std::vector<InvariantRowRecord<T>> records;
};

// The redistribution criterion: within the separable-family setting (binary
// H), the factorization is non-identifiable precisely when some extra row
// is strictly positive across one whole part.  With no such row the
// factorization is unique.
template <typename T>
Type2Evidence<T> is_type2_nonidentifiable(const Factorization<T>& f, const SfaCertificate& cert,
                                          double tol = kDefaultTol) {
    if (!cert.binary_h)
        throw std::invalid_argument(
            "redistribution criterion requires the binary-H standing assumption");
    Type2Evidence<T> out;
    out.records = find_invariant_rows(f, cert, tol);
    out.non_identifiable = !out.records.empty();
    return out;
}

template <typename T>
SolutionFamily<T> make_solution_family(const Factorization<T>& f, const SfaCertificate& cert,
                                       double tol = kDefaultTol) {
    if (!cert.binary_h)
        throw std::invalid_argument(
            "solution family requires the binary-H standing assumption");
    return SolutionFamily<T>{f, cert.indexing, find_invariant_rows(f, cert, tol)};
}

namespace detail {

template <typename T>
void check_simplex_point(const std::vector<T>& theta, index_t parts, double tol) {
    if (theta.size() != parts)
        throw std::invalid_argument("theta must have one entry per part");
    T sum(0);
    for (const T& t : theta) {
        if (t < T(0)) throw std::invalid_argument("theta has a negative entry");
        sum += t;
    }
    if constexpr (is_exact_v<T>) {
        if (sum != T(1)) throw std::invalid_argument("theta entries must sum to 1");
    } else {
        if (std::fabs(to_double(sum) - 1.0) > tol)
            throw std::invalid_argument("theta entries must sum to 1");
    }
}

}  // namespace detail

// Member of the family: per record (m, part q, eps), entry W(m, r(p, a))
// gains theta_p * eps and the recorded part's entries lose eps, moving mass
// between parts while W(theta) * H stays exactly W * H.
template <typename T>
Factorization<T> family_member(const SolutionFamily<T>& fam,
                               const std::vector<std::vector<T>>& thetas,
                               double tol = kDefaultTol) {
    if (thetas.size() != fam.records.size())
        throw std::invalid_argument("one simplex point per invariant-row record required");
    Matrix<T> w = fam.base.w;
    const index_t parts = fam.indexing.parts();
    const index_t arts = fam.indexing.articulations();
    for (std::size_t k = 0; k < fam.records.size(); ++k) {
        const InvariantRowRecord<T>& rec = fam.records[k];
        detail::check_simplex_point(thetas[k], parts, tol);
        for (index_t p = 0; p < parts; ++p)
            for (index_t a = 0; a < arts; ++a) {
                T& entry = w(rec.row, fam.indexing.r_of(p, a));
                entry += thetas[k][p] * rec.epsilon;
                if (p == rec.part) entry -= rec.epsilon;
            }
    }
    if constexpr (!is_exact_v<T>) {
        // Clamp float round-off: the exact value is >= 0 by construction.
        double thr = tol * (1.0 + to_double(w.max_abs()));
        for (index_t i = 0; i < w.rows(); ++i)
            for (index_t j = 0; j < w.cols(); ++j)
                if (w(i, j) < 0.0 && w(i, j) >= -thr) w(i, j) = 0.0;
    }
    return Factorization<T>(std::move(w), fam.base.h);
}

// Same simplex point applied to every record.
template <typename T>
Factorization<T> family_member(const SolutionFamily<T>& fam, const std::vector<T>& theta,
                               double tol = kDefaultTol) {
    return family_member(fam, std::vector<std::vector<T>>(fam.records.size(), theta), tol);
}

// ---------------------------------------------------------------------------
// Rank deficit: a valid separable family with redistribution structure has
// nonnegative rank R strictly above the linear rank of S = WH.
// ---------------------------------------------------------------------------

struct RankDeficit {
    index_t rank_s = 0;
    index_t inner = 0;
    bool deficit = false;
};

template <typename T>
RankDeficit rank_deficit_check(const Factorization<T>& f, const SfaCertificate& cert,
                               double tol = kDefaultTol) {
    (void)cert;
    RankDeficit out;
    out.rank_s = rank(f.product(), tol);
    out.inner = f.inner_rank();
    out.deficit = out.rank_s < out.inner;
    return out;
}

}  // namespace nmfid

#endif  // NMFID_SFA_HPP
