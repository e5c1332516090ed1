#ifndef NMFID_CLASSIFY_HPP
#define NMFID_CLASSIFY_HPP

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nmfid/certify.hpp"
#include "nmfid/linalg.hpp"
#include "nmfid/matrix.hpp"
#include "nmfid/solve.hpp"

namespace nmfid {

enum class TypeKind { type1, type2, type3, no_evidence };

inline const char* to_string(TypeKind k) {
    switch (k) {
        case TypeKind::type1: return "TypeI";
        case TypeKind::type2: return "TypeII";
        case TypeKind::type3: return "TypeIII";
        default: return "NoEvidence";
    }
}

// A target together with several exact factorizations of it, all sharing
// the inner rank; exactness is checked at construction.
template <typename T>
struct SolutionSet {
    Matrix<T> s;
    std::vector<Factorization<T>> members;

    SolutionSet(Matrix<T> s_, std::vector<Factorization<T>> members_, double tol = kDefaultTol)
        : s(std::move(s_)), members(std::move(members_)) {
        if (members.empty())
            throw std::invalid_argument("solution set needs at least one member");
        for (const auto& f : members) {
            if (f.inner_rank() != members.front().inner_rank())
                throw std::invalid_argument("solution-set members must share the inner rank");
            if (!is_exact_factorization(s, f, tol))
                throw InexactFactorizationError("solution-set member does not factor S exactly");
        }
    }
};

template <typename T>
struct PairWitness {
    index_t first = 0;
    index_t second = 0;
    Matrix<T> q;
    std::string relation;  // human-readable statement the matrix satisfies

    PairWitness(index_t a, index_t b, Matrix<T> q_, std::string rel)
        : first(a), second(b), q(std::move(q_)), relation(std::move(rel)) {}
};

template <typename T>
struct TypeVerdict {
    TypeKind kind = TypeKind::no_evidence;
    std::vector<std::vector<index_t>> subspace_groups;   // partition of member indices
    std::vector<PairWitness<T>> monomial_witnesses;      // pairs identical up to scaling+permutation
    std::vector<PairWitness<T>> basis_witnesses;         // same-space non-monomial changes of basis
    std::vector<PairWitness<T>> cross_witnesses;         // across-space row maps
    bool degenerate_rank_deficient = false;
    std::string notes;
};

// ---------------------------------------------------------------------------
// Monomial relation: search for a monomial Q with W2 = W1 Q and
// H2 = Q^{-1} H1.  Column c2 of W2 can only match a column c1 of W1 that is
// a positive multiple of it (with the inverse scaling on the H rows), so
// the search is a bipartite matching over scale-compatible column pairs.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
bool scale_compatible(const Matrix<T>& w1, const Matrix<T>& w2, const Matrix<T>& h1,
                      const Matrix<T>& h2, index_t c1, index_t c2, double thr_w, double thr_h,
                      T& d_out) {
    // Candidate scale from the W columns, else from the H rows.
    T d(0);
    bool have_d = false;
    for (index_t i = 0; i < w1.rows() && !have_d; ++i) {
        bool nz1 = entry_nonzero(w1(i, c1), thr_w), nz2 = entry_nonzero(w2(i, c2), thr_w);
        if (nz1 != nz2) return false;
        if (nz1) {
            d = w2(i, c2) / w1(i, c1);
            have_d = true;
        }
    }
    if (!have_d) {
        for (index_t j = 0; j < h1.cols() && !have_d; ++j) {
            bool nz1 = entry_nonzero(h1(c1, j), thr_h), nz2 = entry_nonzero(h2(c2, j), thr_h);
            if (nz1 != nz2) return false;
            if (nz1) {
                d = h1(c1, j) / h2(c2, j);
                have_d = true;
            }
        }
    }
    if (!have_d) d = T(1);  // both the column and the row are zero
    if (d <= T(0)) return false;

    for (index_t i = 0; i < w1.rows(); ++i) {
        T diff = w2(i, c2) - d * w1(i, c1);
        if constexpr (is_exact_v<T>) {
            if (diff != T(0)) return false;
        } else {
            if (std::fabs(to_double(diff)) > thr_w * (1.0 + std::fabs(to_double(d)))) return false;
        }
    }
    for (index_t j = 0; j < h1.cols(); ++j) {
        T diff = h2(c2, j) - h1(c1, j) / d;
        if constexpr (is_exact_v<T>) {
            if (diff != T(0)) return false;
        } else {
            if (std::fabs(to_double(diff)) > thr_h * (1.0 + 1.0 / std::fabs(to_double(d))))
                return false;
        }
    }
    d_out = d;
    return true;
}

// Kuhn's augmenting-path bipartite matching; adjacency scanned in
// ascending order so the lowest-index assignment wins deterministically.
inline bool try_augment(index_t c2, const std::vector<std::vector<index_t>>& adj,
                        std::vector<bool>& visited, std::vector<index_t>& match_c1,
                        index_t npos) {
    for (index_t c1 : adj[c2]) {
        if (visited[c1]) continue;
        visited[c1] = true;
        if (match_c1[c1] == npos || try_augment(match_c1[c1], adj, visited, match_c1, npos)) {
            match_c1[c1] = c2;
            return true;
        }
    }
    return false;
}

}  // namespace detail

template <typename T>
std::optional<Matrix<T>> relate_by_monomial(const Matrix<T>& w1, const Matrix<T>& w2,
                                            const Matrix<T>& h1, const Matrix<T>& h2,
                                            double tol = kDefaultTol) {
    if (w1.rows() != w2.rows() || w1.cols() != w2.cols() || h1.rows() != h2.rows() ||
        h1.cols() != h2.cols() || w1.cols() != h1.rows())
        throw std::invalid_argument("shape mismatch in relate_by_monomial");
    const index_t r_count = w1.cols();
    double thr_w = std::max(support_threshold(w1, tol), support_threshold(w2, tol));
    double thr_h = std::max(support_threshold(h1, tol), support_threshold(h2, tol));

    std::vector<std::vector<index_t>> adj(r_count);
    std::vector<std::vector<T>> scale(r_count, std::vector<T>(r_count, T(0)));
    for (index_t c2 = 0; c2 < r_count; ++c2)
        for (index_t c1 = 0; c1 < r_count; ++c1) {
            T d(0);
            if (detail::scale_compatible(w1, w2, h1, h2, c1, c2, thr_w, thr_h, d)) {
                adj[c2].push_back(c1);
                scale[c2][c1] = d;
            }
        }

    const index_t npos = r_count;
    std::vector<index_t> match_c1(r_count, npos);  // c1 -> c2
    for (index_t c2 = 0; c2 < r_count; ++c2) {
        std::vector<bool> visited(r_count, false);
        if (!detail::try_augment(c2, adj, visited, match_c1, npos)) return std::nullopt;
    }
    Matrix<T> q(r_count, r_count);
    for (index_t c1 = 0; c1 < r_count; ++c1) {
        index_t c2 = match_c1[c1];
        q(c1, c2) = scale[c2][c1];
    }
    return q;
}

// ---------------------------------------------------------------------------
// Witness extraction.
// ---------------------------------------------------------------------------

namespace detail {

// Same-space change of basis Q with W2 ~= W1 Q.  Exact mode solves the
// linear system directly (and must succeed when the column spaces agree);
// float mode uses the normal equations, i.e. the pseudoinverse formula
// (W1^T W1)^+ W1^T W2.
template <typename T>
std::optional<Matrix<T>> basis_change(const Matrix<T>& w1, const Matrix<T>& w2, double tol) {
    if constexpr (is_exact_v<T>) {
        auto q = solve_linear(w1, w2, tol);
        if (!q)
            throw std::logic_error(
                "column spaces were reported equal but W1 X = W2 is inconsistent");
        return q;
    } else {
        return solve_linear(w1.transpose() * w1, w1.transpose() * w2, tol);
    }
}

// Cross-space witness: a row-mixing map Q with W_first = Q * W_second
// (tried in that direction first, then reversed).
template <typename T>
std::optional<PairWitness<T>> cross_witness(index_t i, index_t j, const Matrix<T>& wi,
                                            const Matrix<T>& wj, double tol) {
    if (auto x = solve_linear(wj.transpose(), wi.transpose(), tol)) {
        std::ostringstream rel;
        rel << "W" << i + 1 << " = Q * W" << j + 1;
        return PairWitness<T>(i, j, x->transpose(), rel.str());
    }
    if (auto x = solve_linear(wi.transpose(), wj.transpose(), tol)) {
        std::ostringstream rel;
        rel << "W" << j + 1 << " = Q * W" << i + 1;
        return PairWitness<T>(j, i, x->transpose(), rel.str());
    }
    return std::nullopt;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The trichotomy over a set of exact factorizations:
//   * one column-space group with a non-monomially-related pair  -> Type I
//   * several groups, each internally monomial                  -> Type II
//   * several groups and a non-monomial pair inside one         -> Type III
//   * otherwise                                                 -> NoEvidence
// ---------------------------------------------------------------------------

template <typename T>
TypeVerdict<T> classify_solution_set(const SolutionSet<T>& ss, double tol = kDefaultTol) {
    TypeVerdict<T> verdict;
    const std::size_t n = ss.members.size();

    // Union-find over members by factor column space.
    std::vector<index_t> parent(n);
    for (index_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](index_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (index_t i = 0; i < n; ++i)
        for (index_t j = i + 1; j < n; ++j)
            if (find(i) != find(j) &&
                column_space_equal(ss.members[i].w, ss.members[j].w, tol))
                parent[find(j)] = find(i);

    std::vector<std::vector<index_t>> groups;
    std::vector<index_t> group_of(n);
    for (index_t i = 0; i < n; ++i) {
        if (find(i) == i) {
            group_of[i] = groups.size();
            groups.push_back({i});
        }
    }
    for (index_t i = 0; i < n; ++i)
        if (find(i) != i) {
            group_of[i] = group_of[find(i)];
            groups[group_of[i]].push_back(i);
        }
    verdict.subspace_groups = groups;

    // Within-group relations: monomial pairs vs genuine changes of basis.
    bool any_nonmonomial = false;
    for (const auto& g : groups)
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = a + 1; b < g.size(); ++b) {
                index_t i = g[a], j = g[b];
                auto q = relate_by_monomial(ss.members[i].w, ss.members[j].w, ss.members[i].h,
                                            ss.members[j].h, tol);
                if (q) {
                    std::ostringstream rel;
                    rel << "W" << j + 1 << " = W" << i + 1 << " * Q (monomial), H" << j + 1
                        << " = Q^-1 * H" << i + 1;
                    verdict.monomial_witnesses.emplace_back(i, j, std::move(*q), rel.str());
                } else {
                    any_nonmonomial = true;
                    if (auto qb = detail::basis_change(ss.members[i].w, ss.members[j].w, tol)) {
                        std::ostringstream rel;
                        rel << "W" << j + 1 << " = W" << i + 1 << " * Q (non-monomial)";
                        verdict.basis_witnesses.emplace_back(i, j, std::move(*qb), rel.str());
                    }
                }
            }

    // Across-group witnesses and nesting diagnostics between representatives.
    for (std::size_t g1 = 0; g1 < groups.size(); ++g1)
        for (std::size_t g2 = g1 + 1; g2 < groups.size(); ++g2) {
            index_t i = groups[g1].front(), j = groups[g2].front();
            const Matrix<T>& wi = ss.members[i].w;
            const Matrix<T>& wj = ss.members[j].w;
            if (auto cw = detail::cross_witness(i, j, wi, wj, tol))
                verdict.cross_witnesses.push_back(std::move(*cw));
            index_t ri = rank(wi, tol), rj = rank(wj, tol);
            if (ri != rj &&
                (ri < rj ? column_space_contained(wi, wj, tol)
                         : column_space_contained(wj, wi, tol)))
                verdict.degenerate_rank_deficient = true;
        }

    if (n == 1) {
        verdict.kind = TypeKind::no_evidence;
        verdict.notes = "single factorization: nothing to compare";
        return verdict;
    }
    if (groups.size() == 1)
        verdict.kind = any_nonmonomial ? TypeKind::type1 : TypeKind::no_evidence;
    else
        verdict.kind = any_nonmonomial ? TypeKind::type3 : TypeKind::type2;

    std::ostringstream note;
    note << groups.size() << " column-space group(s) among " << n << " factorization(s)";
    if (verdict.kind == TypeKind::no_evidence && n > 1)
        note << "; all pairs are monomially related";
    if (verdict.degenerate_rank_deficient)
        note << "; degenerate: rank-deficient extension (one factor space strictly contains "
                "another)";
    verdict.notes = note.str();
    return verdict;
}

template <typename T>
TypeVerdict<T> classify_pair(const Matrix<T>& s, const Factorization<T>& f1,
                             const Factorization<T>& f2, double tol = kDefaultTol) {
    SolutionSet<T> ss(s, {f1, f2}, tol);
    return classify_solution_set(ss, tol);
}

}  // namespace nmfid

#endif  // NMFID_CLASSIFY_HPP
