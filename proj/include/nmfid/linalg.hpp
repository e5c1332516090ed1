#ifndef NMFID_LINALG_HPP
#define NMFID_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nmfid/matrix.hpp"
#include "nmfid/scalar.hpp"

namespace nmfid {

inline Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (index_t i = 0; i < m.rows(); ++i)
        for (index_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

inline Matrix<double> from_eigen(const Eigen::MatrixXd& m) {
    Matrix<double> out(static_cast<index_t>(m.rows()), static_cast<index_t>(m.cols()));
    for (index_t i = 0; i < out.rows(); ++i)
        for (index_t j = 0; j < out.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

// ---------------------------------------------------------------------------
// Rank.
//
// Exact scalars: clear denominators row by row, then run fraction-free
// (Bareiss) elimination over big integers, so intermediate entries stay
// divisions of determinants and never leave the integers.
//
// Doubles: singular values via Eigen, counting those above tol * sigma_max.
// ---------------------------------------------------------------------------

inline index_t rank_bareiss(const Matrix<Rational>& a) {
    const index_t n = a.rows(), m = a.cols();
    std::vector<std::vector<BigInt>> w(n, std::vector<BigInt>(m));
    for (index_t i = 0; i < n; ++i) {
        BigInt scale = 1;
        for (index_t j = 0; j < m; ++j)
            scale = lcm(scale, BigInt(denominator(a(i, j))));
        for (index_t j = 0; j < m; ++j) {
            Rational v = a(i, j) * Rational(scale);
            w[i][j] = numerator(v);
        }
    }
    BigInt prev = 1;
    index_t r = 0;
    for (index_t c = 0; c < m && r < n; ++c) {
        index_t piv = r;
        while (piv < n && w[piv][c] == 0) ++piv;
        if (piv == n) continue;
        std::swap(w[piv], w[r]);
        for (index_t i = r + 1; i < n; ++i) {
            for (index_t j = c + 1; j < m; ++j)
                w[i][j] = (w[r][c] * w[i][j] - w[i][c] * w[r][j]) / prev;
            w[i][c] = 0;
        }
        prev = w[r][c];
        ++r;
    }
    return r;
}

inline index_t rank_svd(const Matrix<double>& a, double tol) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(to_eigen(a));
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    index_t r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * sv(0)) ++r;
    return r;
}

template <typename T>
index_t rank(const Matrix<T>& a, double tol = kDefaultTol) {
    if constexpr (is_exact_v<T>)
        return rank_bareiss(a);
    else
        return rank_svd(a, tol);
}

// ---------------------------------------------------------------------------
// Reduced row echelon form, shared by the linear solver and the column-space
// tests.  Pivoting is deterministic: exact mode takes the first nonzero in
// the column, float mode the entry of largest magnitude.  Entries at or
// below `threshold` in magnitude count as zero (threshold is 0 in exact
// mode).
// ---------------------------------------------------------------------------

template <typename T>
std::vector<index_t> rref_in_place(Matrix<T>& a, double threshold = 0.0) {
    const index_t n = a.rows(), m = a.cols();
    std::vector<index_t> pivots;
    index_t r = 0;
    for (index_t c = 0; c < m && r < n; ++c) {
        index_t piv = n;
        if constexpr (is_exact_v<T>) {
            for (index_t i = r; i < n; ++i)
                if (a(i, c) != T(0)) {
                    piv = i;
                    break;
                }
        } else {
            double best = threshold;
            for (index_t i = r; i < n; ++i)
                if (std::fabs(a(i, c)) > best) {
                    best = std::fabs(a(i, c));
                    piv = i;
                }
        }
        if (piv == n) continue;
        if (piv != r)
            for (index_t j = 0; j < m; ++j) std::swap(a(piv, j), a(r, j));
        T inv_p = T(1) / a(r, c);
        for (index_t j = c; j < m; ++j) a(r, j) *= inv_p;
        a(r, c) = T(1);
        for (index_t i = 0; i < n; ++i) {
            if (i == r) continue;
            T f = a(i, c);
            if (f == T(0)) continue;
            for (index_t j = c; j < m; ++j) a(i, j) -= f * a(r, j);
            a(i, c) = T(0);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

// Reduced column echelon form: the transpose of the reduced row echelon
// form of the transpose.  It is a canonical representative, so two matrices
// with the same shape span the same column space exactly when their reduced
// column echelon forms are equal (exact arithmetic).
template <typename T>
Matrix<T> column_echelon_form(const Matrix<T>& a, double tol = kDefaultTol) {
    Matrix<T> t = a.transpose();
    double threshold = 0.0;
    if constexpr (!is_exact_v<T>) threshold = tol * std::max(1.0, to_double(t.max_abs()));
    rref_in_place(t, threshold);
    return t.transpose();
}

// Solve A X = B; returns nullopt when inconsistent.  Free variables are set
// to zero, making the answer deterministic.
template <typename T>
std::optional<Matrix<T>> solve_linear(const Matrix<T>& a, const Matrix<T>& b,
                                      double tol = kDefaultTol) {
    if (a.rows() != b.rows()) throw std::invalid_argument("dimension mismatch in solve");
    Matrix<T> aug = a.augment_cols(b);
    double threshold = 0.0;
    if constexpr (!is_exact_v<T>) threshold = tol * std::max(1.0, to_double(aug.max_abs()));
    std::vector<index_t> pivots = rref_in_place(aug, threshold);
    for (index_t p : pivots)
        if (p >= a.cols()) return std::nullopt;  // pivot in the RHS block
    Matrix<T> x(a.cols(), b.cols());
    for (index_t r = 0; r < pivots.size(); ++r)
        for (index_t j = 0; j < b.cols(); ++j) x(pivots[r], j) = aug(r, a.cols() + j);
    return x;
}

template <typename T>
std::optional<Matrix<T>> invert(const Matrix<T>& a, double tol = kDefaultTol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("inverse of non-square matrix");
    auto x = solve_linear(a, Matrix<T>::identity(a.rows()), tol);
    if (!x) return std::nullopt;
    Matrix<T> check = a * *x - Matrix<T>::identity(a.rows());
    if constexpr (is_exact_v<T>) {
        if (check.max_abs() != T(0)) return std::nullopt;
    } else {
        if (to_double(check.max_abs()) > tol * std::max(1.0, to_double(a.max_abs())))
            return std::nullopt;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Column spaces.
// ---------------------------------------------------------------------------

template <typename T>
bool column_space_equal(const Matrix<T>& a, const Matrix<T>& b, double tol = kDefaultTol) {
    if (a.rows() != b.rows()) throw std::invalid_argument("dimension mismatch in column_space_equal");
    index_t ra = rank(a, tol), rb = rank(b, tol);
    if (ra != rb) return false;
    return rank(a.augment_cols(b), tol) == ra;
}

// col(a) subseteq col(b)?
template <typename T>
bool column_space_contained(const Matrix<T>& a, const Matrix<T>& b, double tol = kDefaultTol) {
    if (a.rows() != b.rows()) throw std::invalid_argument("dimension mismatch");
    return rank(b.augment_cols(a), tol) == rank(b, tol);
}

// ---------------------------------------------------------------------------
// Monomial matrices: exactly one nonzero per row and per column, and every
// nonzero is positive (a permutation combined with positive scaling).
// ---------------------------------------------------------------------------

template <typename T>
bool is_monomial(const Matrix<T>& q, double tol = kDefaultTol) {
    if (q.rows() != q.cols()) return false;
    double thr = support_threshold(q, tol);
    std::vector<index_t> row_count(q.rows(), 0), col_count(q.cols(), 0);
    for (index_t i = 0; i < q.rows(); ++i)
        for (index_t j = 0; j < q.cols(); ++j)
            if (entry_nonzero(q(i, j), thr)) {
                if (q(i, j) < T(0)) return false;
                ++row_count[i];
                ++col_count[j];
            }
    for (index_t i = 0; i < q.rows(); ++i)
        if (row_count[i] != 1 || col_count[i] != 1) return false;
    return true;
}

}  // namespace nmfid

#endif  // NMFID_LINALG_HPP
