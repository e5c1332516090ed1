#ifndef NMFID_NNLS_HPP
#define NMFID_NNLS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "nmfid/linalg.hpp"
#include "nmfid/matrix.hpp"

namespace nmfid {

template <typename T>
struct NnlsResult {
    std::vector<T> x;        // solution, length = columns of A
    T residual_sq{0};        // squared euclidean norm of A x - b
    std::size_t iterations{0};
    bool converged{true};
};

// Nonnegative least squares min ||A x - b||^2 subject to x >= 0, by the
// classical active-set method.  The entering variable is always the
// lowest-index candidate (Bland's rule), which prevents cycling; in exact
// arithmetic every test is against literal zero and the result is exact.
//
// The passive-set subproblem is solved through its normal equations.  A
// column whose gradient entry is positive is never in the span of the
// current passive columns (the residual is orthogonal to that span), so the
// normal equations stay uniquely solvable along the way.
template <typename T>
NnlsResult<T> nnls(const Matrix<T>& a, const std::vector<T>& b, double tol = kDefaultTol) {
    const index_t m = a.rows(), n = a.cols();
    if (b.size() != m) throw std::invalid_argument("dimension mismatch in nnls");

    Matrix<T> bcol(m, 1);
    for (index_t i = 0; i < m; ++i) bcol(i, 0) = b[i];

    double w_threshold = 0.0;
    if constexpr (!is_exact_v<T>) {
        double scale = std::max(to_double(a.max_abs()), 1.0) *
                       std::max(to_double(bcol.max_abs()), 1.0);
        w_threshold = tol * scale;
    }

    std::vector<bool> passive(n, false);
    std::vector<T> x(n, T(0));
    NnlsResult<T> result;

    auto residual = [&]() {
        std::vector<T> r(m);
        for (index_t i = 0; i < m; ++i) {
            T acc = bcol(i, 0);
            for (index_t j = 0; j < n; ++j)
                if (x[j] != T(0)) acc -= a(i, j) * x[j];
            r[i] = acc;
        }
        return r;
    };

    const std::size_t max_outer = 3 * n + 10;
    const std::size_t max_inner = 3 * n + 10;
    for (std::size_t outer = 0; outer < max_outer; ++outer) {
        ++result.iterations;
        std::vector<T> r = residual();
        // Gradient w = A^T r; pick the lowest-index strictly improving
        // coordinate outside the passive set.
        index_t enter = n;
        for (index_t j = 0; j < n && enter == n; ++j) {
            if (passive[j]) continue;
            T wj(0);
            for (index_t i = 0; i < m; ++i) wj += a(i, j) * r[i];
            if constexpr (is_exact_v<T>) {
                if (wj > T(0)) enter = j;
            } else {
                if (to_double(wj) > w_threshold) enter = j;
            }
        }
        if (enter == n) break;  // KKT conditions hold
        passive[enter] = true;

        bool inner_ok = false;
        for (std::size_t inner = 0; inner < max_inner; ++inner) {
            std::vector<index_t> pidx;
            for (index_t j = 0; j < n; ++j)
                if (passive[j]) pidx.push_back(j);
            Matrix<T> ap = a.select_cols(pidx);
            Matrix<T> gram = ap.transpose() * ap;
            Matrix<T> rhs = ap.transpose() * bcol;
            auto zsol = solve_linear(gram, rhs, tol);
            if (!zsol) {
                result.converged = false;
                break;
            }
            bool all_pos = true;
            for (index_t k = 0; k < pidx.size(); ++k)
                if ((*zsol)(k, 0) <= T(0)) all_pos = false;
            if (all_pos) {
                for (index_t j = 0; j < n; ++j) x[j] = T(0);
                for (index_t k = 0; k < pidx.size(); ++k) x[pidx[k]] = (*zsol)(k, 0);
                inner_ok = true;
                break;
            }
            // Step toward z until the first passive coordinate hits zero.
            bool have_alpha = false;
            T alpha(0);
            for (index_t k = 0; k < pidx.size(); ++k) {
                T zk = (*zsol)(k, 0);
                if (zk > T(0)) continue;
                T xk = x[pidx[k]];
                T denom = xk - zk;
                if (denom == T(0)) continue;
                T cand = xk / denom;
                if (!have_alpha || cand < alpha) {
                    alpha = cand;
                    have_alpha = true;
                }
            }
            if (!have_alpha) {
                result.converged = false;
                break;
            }
            for (index_t k = 0; k < pidx.size(); ++k) {
                index_t j = pidx[k];
                x[j] = x[j] + alpha * ((*zsol)(k, 0) - x[j]);
            }
            for (index_t k = 0; k < pidx.size(); ++k) {
                index_t j = pidx[k];
                bool zero;
                if constexpr (is_exact_v<T>)
                    zero = (x[j] <= T(0));
                else
                    zero = (to_double(x[j]) <= w_threshold);
                if (zero) {
                    x[j] = T(0);
                    passive[j] = false;
                }
            }
        }
        if (!inner_ok) {
            result.converged = false;
            break;
        }
    }

    std::vector<T> r = residual();
    T rsq(0);
    for (const T& v : r) rsq += v * v;
    result.x = std::move(x);
    result.residual_sq = rsq;
    return result;
}

// Is x inside the convex cone generated by the columns of V?  Decided by a
// nonnegative least-squares fit: membership means the fit is exact (residual
// zero in exact mode, below tol relative to the target's size otherwise).
template <typename T>
struct ConeMembership {
    bool inside{false};
    std::vector<T> coefficients;
    double residual{0.0};
};

template <typename T>
ConeMembership<T> cone_membership_detailed(const Matrix<T>& v, const std::vector<T>& x,
                                           double tol = kDefaultTol) {
    NnlsResult<T> fit = nnls(v, x, tol);
    ConeMembership<T> out;
    out.coefficients = fit.x;
    out.residual = std::sqrt(std::max(0.0, to_double(fit.residual_sq)));
    if constexpr (is_exact_v<T>) {
        out.inside = (fit.residual_sq == T(0));
    } else {
        double scale = 1.0;
        for (const T& e : x) scale = std::max(scale, std::fabs(to_double(e)));
        out.inside = out.residual <= tol * scale * std::sqrt(static_cast<double>(x.size()));
    }
    return out;
}

// Membership as an optional coefficient vector: present iff x lies in the
// cone generated by the columns of v (at the declared tolerance).
template <typename T>
std::optional<std::vector<T>> cone_membership(const Matrix<T>& v, const std::vector<T>& x,
                                              double tol = kDefaultTol) {
    ConeMembership<T> d = cone_membership_detailed(v, x, tol);
    if (!d.inside) return std::nullopt;
    return d.coefficients;
}

}  // namespace nmfid

#endif  // NMFID_NNLS_HPP
