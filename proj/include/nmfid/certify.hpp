#ifndef NMFID_CERTIFY_HPP
#define NMFID_CERTIFY_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nmfid/linalg.hpp"
#include "nmfid/matrix.hpp"
#include "nmfid/solve.hpp"

namespace nmfid {

// Thrown when an enumeration guard (A^P over the cap) would be exceeded.
struct CombinatorialLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an operation requires an exact factorization and the given
// pair is not exact at the declared tolerance.
struct InexactFactorizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kFactorialSamplingGuard = 1000000;  // cap on A^P
inline constexpr index_t kPermutationSearchCap = 8;              // cap on R for [B]

// ---------------------------------------------------------------------------
// Part/articulation bookkeeping: a bijection between inner indices
// r in [0, R) and pairs (part p, articulation a) with R = P * A.
// All indices are 0-based internally; serialization adds 1.
// ---------------------------------------------------------------------------

class PartArticulationIndexing {
  public:
    // Canonical contiguous layout: r = p * A + a.
    PartArticulationIndexing(index_t parts, index_t articulations)
        : p_(parts), a_(articulations) {
        if (p_ < 1 || a_ < 1) throw std::invalid_argument("parts and articulations must be >= 1");
        pa_of_r_.resize(p_ * a_);
        r_of_pa_.assign(p_, std::vector<index_t>(a_));
        for (index_t p = 0; p < p_; ++p)
            for (index_t a = 0; a < a_; ++a) {
                pa_of_r_[p * a_ + a] = {p, a};
                r_of_pa_[p][a] = p * a_ + a;
            }
    }

    // Explicit bijection: pa_of_r[r] = (p, a).
    PartArticulationIndexing(index_t parts, index_t articulations,
                             std::vector<std::pair<index_t, index_t>> pa_of_r)
        : p_(parts), a_(articulations), pa_of_r_(std::move(pa_of_r)) {
        if (p_ < 1 || a_ < 1) throw std::invalid_argument("parts and articulations must be >= 1");
        if (pa_of_r_.size() != p_ * a_)
            throw std::invalid_argument("index map must cover all R = P*A inner indices");
        r_of_pa_.assign(p_, std::vector<index_t>(a_, pa_of_r_.size()));
        for (index_t r = 0; r < pa_of_r_.size(); ++r) {
            auto [p, a] = pa_of_r_[r];
            if (p >= p_ || a >= a_) throw std::invalid_argument("index map entry out of range");
            if (r_of_pa_[p][a] != pa_of_r_.size())
                throw std::invalid_argument("index map is not injective");
            r_of_pa_[p][a] = r;
        }
    }

    index_t parts() const { return p_; }
    index_t articulations() const { return a_; }
    index_t inner() const { return p_ * a_; }
    index_t r_of(index_t p, index_t a) const { return r_of_pa_.at(p).at(a); }
    std::pair<index_t, index_t> pa_of(index_t r) const { return pa_of_r_.at(r); }

  private:
    index_t p_;
    index_t a_;
    std::vector<std::pair<index_t, index_t>> pa_of_r_;
    std::vector<std::vector<index_t>> r_of_pa_;
};

// One dedicated detector row of W per (part, articulation) pair: the row is
// nonzero exactly at column r(p, a).
struct SeparabilityWitness {
    std::vector<std::vector<index_t>> row_of;  // [p][a] -> row index of W

    index_t row_for(index_t p, index_t a) const { return row_of.at(p).at(a); }
};

// Column supports of W and row supports of H, indexed by the inner index.
struct SupportSets {
    std::vector<std::vector<index_t>> w_col_support;  // M_r, sorted
    std::vector<std::vector<index_t>> h_row_support;  // N_r, sorted
};

enum class Verdict { holds, fails, unknown };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        default: return "unknown";
    }
}

struct CertificateReport {
    std::string condition;  // stable machine name
    std::string reference;  // literature attribution of the condition
    Verdict verdict = Verdict::unknown;
    std::string notes;
    std::vector<std::string> flags;  // machine-readable markers, e.g. "A=2"
    // Witness payloads (meaning depends on the condition; 0-based).
    std::vector<index_t> witness_rows;
    std::vector<index_t> witness_cols;
    std::vector<std::vector<index_t>> witness_sets;
    std::vector<std::pair<index_t, index_t>> violations;
};

namespace detail {

template <typename T>
std::vector<std::vector<index_t>> column_supports(const Matrix<T>& a, double tol) {
    double thr = support_threshold(a, tol);
    std::vector<std::vector<index_t>> out(a.cols());
    for (index_t j = 0; j < a.cols(); ++j)
        for (index_t i = 0; i < a.rows(); ++i)
            if (entry_nonzero(a(i, j), thr)) out[j].push_back(i);
    return out;
}

template <typename T>
std::vector<std::vector<index_t>> row_supports(const Matrix<T>& a, double tol) {
    double thr = support_threshold(a, tol);
    std::vector<std::vector<index_t>> out(a.rows());
    for (index_t i = 0; i < a.rows(); ++i)
        for (index_t j = 0; j < a.cols(); ++j)
            if (entry_nonzero(a(i, j), thr)) out[i].push_back(j);
    return out;
}

inline std::string pair_1based(index_t p, index_t a) {
    std::ostringstream os;
    os << "(part " << p + 1 << ", articulation " << a + 1 << ")";
    return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Separability: every (part, articulation) pair has a detector row whose
// support is exactly its inner column.  Holds-witness: lowest such row per
// pair, listed in witness_rows ordered by (p, a).
// ---------------------------------------------------------------------------

struct SeparabilityResult {
    CertificateReport report;
    std::optional<SeparabilityWitness> witness;
};

template <typename T>
SeparabilityResult check_separability(const Matrix<T>& w, const PartArticulationIndexing& idx,
                                      double tol = kDefaultTol) {
    if (w.cols() != idx.inner())
        throw std::invalid_argument("W must have P*A columns for the given indexing");
    SeparabilityResult out;
    out.report.condition = "separability";
    out.report.reference = "Donoho & Stodden separability condition";

    std::vector<std::vector<index_t>> rows = detail::row_supports(w, tol);
    // detector_for[r] = lowest row whose support is exactly {r}
    std::vector<index_t> detector_for(idx.inner(), w.rows());
    for (index_t m = 0; m < w.rows(); ++m)
        if (rows[m].size() == 1) {
            index_t r = rows[m][0];
            if (detector_for[r] == w.rows()) detector_for[r] = m;
        }

    SeparabilityWitness wit;
    wit.row_of.assign(idx.parts(), std::vector<index_t>(idx.articulations()));
    std::vector<std::string> missing;
    for (index_t p = 0; p < idx.parts(); ++p)
        for (index_t a = 0; a < idx.articulations(); ++a) {
            index_t r = idx.r_of(p, a);
            if (detector_for[r] == w.rows()) {
                missing.push_back(detail::pair_1based(p, a));
            } else {
                wit.row_of[p][a] = detector_for[r];
            }
        }
    if (missing.empty()) {
        out.report.verdict = Verdict::holds;
        for (index_t p = 0; p < idx.parts(); ++p)
            for (index_t a = 0; a < idx.articulations(); ++a)
                out.report.witness_rows.push_back(wit.row_of[p][a]);
        out.witness = std::move(wit);
        out.report.notes = "every (part, articulation) pair has a dedicated detector row";
    } else {
        out.report.verdict = Verdict::fails;
        std::ostringstream os;
        os << "no detector row for ";
        for (std::size_t i = 0; i < missing.size(); ++i) os << (i ? ", " : "") << missing[i];
        out.report.notes = os.str();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Complete factorial sampling: for every articulation assignment
// (a_1, ..., a_P) some column of H has support exactly
// {r(1, a_1), ..., r(P, a_P)}.  Enumerates all A^P assignments, guarded.
// ---------------------------------------------------------------------------

template <typename T>
CertificateReport check_complete_factorial_sampling(const Matrix<T>& h,
                                                    const PartArticulationIndexing& idx,
                                                    double tol = kDefaultTol) {
    if (h.rows() != idx.inner())
        throw std::invalid_argument("H must have P*A rows for the given indexing");
    CertificateReport report;
    report.condition = "complete_factorial_sampling";
    report.reference = "Donoho & Stodden complete factorial sampling";

    double combos = 1.0;
    for (index_t p = 0; p < idx.parts(); ++p) {
        combos *= static_cast<double>(idx.articulations());
        if (combos > static_cast<double>(kFactorialSamplingGuard))
            throw CombinatorialLimitError("A^P exceeds the enumeration guard of 10^6");
    }

    std::vector<std::vector<index_t>> cols = detail::column_supports(h, tol);
    std::map<std::vector<index_t>, index_t> first_column_with;  // support -> lowest column
    for (index_t n = 0; n < h.cols(); ++n)
        if (!first_column_with.count(cols[n])) first_column_with[cols[n]] = n;

    const index_t p_count = idx.parts(), a_count = idx.articulations();
    std::vector<index_t> assign(p_count, 0);
    const bool record_witness = combos <= 4096.0;
    while (true) {
        std::vector<index_t> target;
        target.reserve(p_count);
        for (index_t p = 0; p < p_count; ++p) target.push_back(idx.r_of(p, assign[p]));
        std::sort(target.begin(), target.end());
        auto it = first_column_with.find(target);
        if (it == first_column_with.end()) {
            report.verdict = Verdict::fails;
            std::ostringstream os;
            os << "missing assignment (";
            for (index_t p = 0; p < p_count; ++p) os << (p ? "," : "") << assign[p] + 1;
            os << "): no column has support exactly {";
            for (std::size_t t = 0; t < target.size(); ++t)
                os << (t ? "," : "") << target[t] + 1;
            os << "}";
            report.notes = os.str();
            return report;
        }
        if (record_witness) report.witness_cols.push_back(it->second);
        // Odometer step over assignments.
        index_t p = 0;
        while (p < p_count && ++assign[p] == a_count) assign[p++] = 0;
        if (p == p_count) break;
    }
    report.verdict = Verdict::holds;
    std::ostringstream os;
    os << "all " << static_cast<unsigned long long>(combos) << " articulation assignments are sampled";
    report.notes = os.str();
    return report;
}

// ---------------------------------------------------------------------------
// The separable-factorial uniqueness condition: generative structure
// (R = P*A and S = WH), complete factorial sampling, separability, and more
// than two articulations.  With A = 2 the verdict is unknown: such families
// can admit a second factorization inside col(W).
// ---------------------------------------------------------------------------

template <typename T>
CertificateReport check_donoho(const Matrix<T>& s, const Factorization<T>& f,
                               const PartArticulationIndexing& idx, double tol = kDefaultTol) {
    CertificateReport report;
    report.condition = "donoho_unique_in_span";
    report.reference = "Donoho & Stodden uniqueness for separable factorial families";
    if (!is_exact_factorization(s, f, tol))
        throw InexactFactorizationError("check requires an exact factorization of S");
    if (f.inner_rank() != idx.inner()) {
        report.verdict = Verdict::fails;
        report.notes = "inner rank differs from P*A";
        return report;
    }
    SeparabilityResult r3 = check_separability(f.w, idx, tol);
    CertificateReport r2 = check_complete_factorial_sampling(f.h, idx, tol);
    if (r3.report.verdict != Verdict::holds || r2.verdict != Verdict::holds) {
        report.verdict = Verdict::fails;
        std::ostringstream os;
        os << "sub-conditions: separability " << to_string(r3.report.verdict)
           << ", complete factorial sampling " << to_string(r2.verdict);
        report.notes = os.str();
        return report;
    }
    report.witness_rows = r3.report.witness_rows;
    if (idx.articulations() <= 2) {
        report.verdict = Verdict::unknown;
        report.flags.push_back("A=2");
        report.notes =
            "A = 2: the uniqueness claim needs more than two articulations; "
            "families with two articulations admit counterexamples";
        return report;
    }
    report.verdict = Verdict::holds;
    report.notes = "factorization is unique within col(W)";
    return report;
}

// ---------------------------------------------------------------------------
// Sufficiently spread.  Default reading: every inner index has a pure
// column of H (support exactly {r}).  The literal variant instead requires
// each row of H to have a single nonzero; it is preserved behind a flag
// because it contradicts the standard usage.
// ---------------------------------------------------------------------------

enum class SpreadReading { column_purity, literal_row };

template <typename T>
CertificateReport check_sufficiently_spread(const Matrix<T>& h, double tol = kDefaultTol,
                                            SpreadReading reading = SpreadReading::column_purity) {
    CertificateReport report;
    report.condition = "sufficiently_spread";
    report.reference = "Laurberg et al. sufficiently spread condition";
    std::vector<index_t> missing;
    if (reading == SpreadReading::column_purity) {
        std::vector<std::vector<index_t>> cols = detail::column_supports(h, tol);
        std::vector<index_t> pure_col(h.rows(), h.cols());
        for (index_t n = 0; n < h.cols(); ++n)
            if (cols[n].size() == 1 && pure_col[cols[n][0]] == h.cols())
                pure_col[cols[n][0]] = n;
        for (index_t r = 0; r < h.rows(); ++r) {
            if (pure_col[r] == h.cols())
                missing.push_back(r);
            else
                report.witness_cols.push_back(pure_col[r]);
        }
    } else {
        report.flags.push_back("literal-reading");
        std::vector<std::vector<index_t>> rows = detail::row_supports(h, tol);
        for (index_t r = 0; r < h.rows(); ++r) {
            if (rows[r].size() == 1)
                report.witness_cols.push_back(rows[r][0]);
            else
                missing.push_back(r);
        }
    }
    if (missing.empty()) {
        report.verdict = Verdict::holds;
        report.notes = reading == SpreadReading::column_purity
                           ? "every inner index has a pure column"
                           : "every row of H has a single nonzero";
    } else {
        report.verdict = Verdict::fails;
        report.witness_cols.clear();
        std::ostringstream os;
        os << (reading == SpreadReading::column_purity ? "no pure column for inner index "
                                                       : "multiple nonzeros in row ");
        for (std::size_t i = 0; i < missing.size(); ++i) os << (i ? ", " : "") << missing[i] + 1;
        report.notes = os.str();
    }
    return report;
}

// ---------------------------------------------------------------------------
// Boundary close.  Default reading: every column of W has at least one zero
// entry.  The strict variant keeps the literal statement (exactly one zero,
// all other entries nonzero).  Failure is itself informative: a strictly
// positive column certifies that the NMF cannot be unique.
// ---------------------------------------------------------------------------

enum class BoundaryReading { at_least_one_zero, exactly_one_zero };

template <typename T>
CertificateReport check_boundary_close(const Matrix<T>& w, double tol = kDefaultTol,
                                       BoundaryReading reading = BoundaryReading::at_least_one_zero) {
    CertificateReport report;
    report.condition = "boundary_close";
    report.reference = "Laurberg et al. boundary close (necessary for uniqueness)";
    if (reading == BoundaryReading::exactly_one_zero) report.flags.push_back("strict-variant");
    double thr = support_threshold(w, tol);
    std::vector<index_t> bad;
    for (index_t r = 0; r < w.cols(); ++r) {
        std::vector<index_t> zeros;
        for (index_t m = 0; m < w.rows(); ++m)
            if (!entry_nonzero(w(m, r), thr)) zeros.push_back(m);
        bool ok = reading == BoundaryReading::at_least_one_zero ? !zeros.empty()
                                                                : zeros.size() == 1;
        if (ok)
            report.witness_rows.push_back(zeros.front());
        else
            bad.push_back(r);
    }
    if (bad.empty()) {
        report.verdict = Verdict::holds;
        report.notes = "every column of W touches the boundary of the nonnegative orthant";
    } else {
        report.verdict = Verdict::fails;
        report.witness_rows.clear();
        report.witness_cols = bad;
        std::ostringstream os;
        bool strictly_positive = reading == BoundaryReading::at_least_one_zero;
        os << (strictly_positive ? "strictly positive column(s) " : "column(s) without exactly one zero: ");
        for (std::size_t i = 0; i < bad.size(); ++i) os << (i ? ", " : "") << bad[i] + 1;
        if (strictly_positive) os << "; by the necessary condition, the NMF cannot be unique";
        report.notes = os.str();
    }
    return report;
}

// ---------------------------------------------------------------------------
// Strongly boundary close: boundary close, plus for every m in 1..R there
// are R-m columns that vanish on row m and whose restriction to rows
// m+1..R is invertible.
//
// The permutation in the literature statement only relabels columns while
// the qualifying column set is freely chosen, so existence of the set is
// permutation-independent; it is decided here by a rank test on the columns
// that vanish on row m.  The R <= 8 cap of the exhaustive-search contract is
// kept, with verdict unknown beyond it.
// ---------------------------------------------------------------------------

template <typename T>
CertificateReport check_strongly_boundary_close(const Matrix<T>& w, double tol = kDefaultTol) {
    CertificateReport report;
    report.condition = "strongly_boundary_close";
    report.reference = "Laurberg et al. strongly boundary close condition";
    const index_t r_count = w.cols();

    CertificateReport bc = check_boundary_close(w, tol);
    if (bc.verdict != Verdict::holds) {
        report.verdict = Verdict::fails;
        report.notes = "boundary-close part fails: " + bc.notes;
        report.witness_cols = bc.witness_cols;
        return report;
    }
    if (r_count > kPermutationSearchCap) {
        report.verdict = Verdict::unknown;
        report.notes = "inner dimension exceeds the exhaustive-search cap of 8";
        report.flags.push_back("search-cap");
        return report;
    }
    if (w.rows() < r_count) {
        report.verdict = Verdict::unknown;
        report.notes = "W has fewer rows than inner indices; the condition is not well-formed";
        return report;
    }

    double thr = support_threshold(w, tol);
    for (index_t m = 0; m < r_count; ++m) {
        const index_t need = r_count - m - 1;
        std::vector<index_t> zero_cols;
        for (index_t c = 0; c < r_count; ++c)
            if (!entry_nonzero(w(m, c), thr)) zero_cols.push_back(c);
        if (need == 0) {
            report.witness_sets.emplace_back();
            continue;
        }
        std::ostringstream fail_note;
        if (zero_cols.size() < need) {
            report.verdict = Verdict::fails;
            fail_note << "row " << m + 1 << " has " << zero_cols.size()
                      << " zero column(s); " << need << " required";
            report.notes = fail_note.str();
            return report;
        }
        std::vector<index_t> lower_rows;
        for (index_t i = m + 1; i < r_count; ++i) lower_rows.push_back(i);
        Matrix<T> sub = w.select_rows(lower_rows).select_cols(zero_cols);
        if (rank(sub, tol) < need) {
            report.verdict = Verdict::fails;
            fail_note << "columns vanishing on row " << m + 1
                      << " do not contain an invertible " << need << "x" << need
                      << " block on rows " << m + 2 << ".." << r_count;
            report.notes = fail_note.str();
            return report;
        }
        // Deterministic witness subset: pivot columns of the restriction.
        Matrix<T> reduced = sub;
        double rthr = 0.0;
        if constexpr (!is_exact_v<T>) rthr = tol * std::max(1.0, to_double(reduced.max_abs()));
        std::vector<index_t> pivots = rref_in_place(reduced, rthr);
        std::vector<index_t> chosen;
        for (index_t p : pivots) chosen.push_back(zero_cols[p]);
        chosen.resize(need);
        report.witness_sets.push_back(std::move(chosen));
    }
    report.verdict = Verdict::holds;
    report.notes = "nested invertible zero-pattern found for every row index";
    return report;
}

// ---------------------------------------------------------------------------
// Support-containment necessary condition: no inner index's W-column
// support (or H-row support) may be contained in another's.  A violation
// certifies non-uniqueness; absence of violations proves nothing.
// ---------------------------------------------------------------------------

struct HuangResult {
    CertificateReport report;
    SupportSets supports;
};

template <typename T>
HuangResult check_huang(const Matrix<T>& w, const Matrix<T>& h, double tol = kDefaultTol) {
    if (w.cols() != h.rows()) throw std::invalid_argument("W and H inner dimensions disagree");
    HuangResult out;
    out.report.condition = "huang_supports";
    out.report.reference = "Huang, Sidiropoulos & Swami support condition (necessary)";
    out.supports.w_col_support = detail::column_supports(w, tol);
    out.supports.h_row_support = detail::row_supports(h, tol);

    const index_t r_count = w.cols();
    for (index_t r1 = 0; r1 < r_count; ++r1)
        for (index_t r2 = 0; r2 < r_count; ++r2) {
            if (r1 == r2) continue;
            const auto& m1 = out.supports.w_col_support[r1];
            const auto& m2 = out.supports.w_col_support[r2];
            const auto& n1 = out.supports.h_row_support[r1];
            const auto& n2 = out.supports.h_row_support[r2];
            bool m_contained = std::includes(m2.begin(), m2.end(), m1.begin(), m1.end());
            bool n_contained = std::includes(n2.begin(), n2.end(), n1.begin(), n1.end());
            if (m_contained || n_contained) out.report.violations.emplace_back(r1, r2);
        }
    if (out.report.violations.empty()) {
        out.report.verdict = Verdict::holds;
        out.report.notes =
            "no support containment; note this is a necessary condition only and does not "
            "certify uniqueness";
    } else {
        out.report.verdict = Verdict::fails;
        std::ostringstream os;
        os << out.report.violations.size()
           << " containment pair(s); the factorization cannot be unique, e.g. pair ("
           << out.report.violations.front().first + 1 << ", "
           << out.report.violations.front().second + 1 << ")";
        out.report.notes = os.str();
    }
    return out;
}

}  // namespace nmfid

#endif  // NMFID_CERTIFY_HPP
