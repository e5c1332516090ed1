#ifndef NMFID_SOLVE_HPP
#define NMFID_SOLVE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nmfid/linalg.hpp"
#include "nmfid/matrix.hpp"
#include "nmfid/nnls.hpp"
#include "nmfid/parallel.hpp"

namespace nmfid {

// A candidate pair S ~= W * H; entrywise nonnegativity and the shared inner
// dimension are enforced on construction.  R may exceed min(M, N): several
// of the constructions this library reproduces use R up to M.
template <typename T>
struct Factorization {
    Matrix<T> w;
    Matrix<T> h;

    Factorization(Matrix<T> w_, Matrix<T> h_) : w(std::move(w_)), h(std::move(h_)) {
        if (w.cols() != h.rows())
            throw std::invalid_argument("factor inner dimensions disagree");
        if (!w.all_nonneg() || !h.all_nonneg())
            throw std::invalid_argument("factors must be entrywise nonnegative");
    }

    index_t inner_rank() const { return w.cols(); }

    Matrix<T> product() const { return w * h; }

    Factorization<double> to_double_factorization() const {
        return Factorization<double>(w.to_double_matrix(), h.to_double_matrix());
    }
};

template <typename T>
T residual_fro_sq(const Matrix<T>& s, const Factorization<T>& f) {
    if (f.w.rows() != s.rows() || f.h.cols() != s.cols())
        throw std::invalid_argument("factorization does not match target dimensions");
    return (s - f.w * f.h).frobenius_sq();
}

// Frobenius-norm residual ||S - WH||_F as a double.  In exact mode the
// squared residual is computed in rational arithmetic, so the result is
// exactly 0.0 precisely when S = WH.
template <typename T>
double verify_exact(const Matrix<T>& s, const Factorization<T>& f) {
    T rsq = residual_fro_sq(s, f);
    if constexpr (is_exact_v<T>) {
        if (rsq == T(0)) return 0.0;
        double v = std::sqrt(to_double(rsq));
        return v > 0.0 ? v : std::numeric_limits<double>::min();
    } else {
        return std::sqrt(std::max(0.0, to_double(rsq)));
    }
}

// Exactness at the declared tolerance: literal equality in rational mode,
// a residual below tol relative to the scale of S otherwise.
template <typename T>
bool is_exact_factorization(const Matrix<T>& s, const Factorization<T>& f,
                            double tol = kDefaultTol) {
    if constexpr (is_exact_v<T>) {
        return residual_fro_sq(s, f) == T(0);
    } else {
        double norm_s = std::sqrt(std::max(0.0, to_double(s.frobenius_sq())));
        return verify_exact(s, f) <= tol * (1.0 + norm_s);
    }
}

enum class Loss { frobenius };

struct SolveConfig {
    index_t target_rank = 1;
    std::size_t max_iters = 5000;
    std::uint64_t seed = 0;
    Loss loss = Loss::frobenius;
    double stop_tol = 1e-6;  // Frobenius residual declaring a run successful
    // Alternating exact-NNLS rounds after the multiplicative phase.  The
    // multiplicative updates approach boundary solutions only at rate 1/k,
    // so exact factorizations with zero entries stall above stop_tol; each
    // polish round exactly minimizes one factor against the other and lands
    // on the boundary directly.
    std::size_t polish_rounds = 30;
};

// SplitMix64: tiny, seedable, platform-independent generator used for
// factor initialization so solver runs are bitwise reproducible.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on (0, 1]: strictly positive so multiplicative updates can
    // reach any support pattern.
    double uniform01() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }
};

struct SolveDetail {
    std::size_t iterations = 0;
    double residual = 0.0;             // Frobenius norm at the best iterate
    std::vector<double> loss_history;  // squared Frobenius loss per iteration
    std::uint64_t seed = 0;
};

namespace detail {

inline double mu_residual_sq(const Matrix<double>& s, const Matrix<double>& w,
                             const Matrix<double>& h) {
    return (s - w * h).frobenius_sq();
}

}  // namespace detail

// Multiplicative-update NMF under the Frobenius loss (double precision
// only).  Monotone in the loss up to the 1e-12 denominator floor; the best
// iterate seen is returned, so the reported residual never increases with
// more iterations.
inline Factorization<double> nmf_solve_detailed(const Matrix<double>& s, const SolveConfig& cfg,
                                                SolveDetail* detail_out = nullptr) {
    if (cfg.target_rank < 1) throw std::invalid_argument("target_rank must be >= 1");
    if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    const index_t m = s.rows(), n = s.cols(), r = cfg.target_rank;
    constexpr double kFloor = 1e-12;

    SplitMix64 rng(cfg.seed);
    Matrix<double> w(m, r), h(r, n);
    for (index_t i = 0; i < m; ++i)
        for (index_t j = 0; j < r; ++j) w(i, j) = rng.uniform01();
    for (index_t i = 0; i < r; ++i)
        for (index_t j = 0; j < n; ++j) h(i, j) = rng.uniform01();

    Matrix<double> best_w = w, best_h = h;
    double best_sq = detail::mu_residual_sq(s, w, h);
    std::vector<double> history;
    history.reserve(cfg.max_iters + 1);
    history.push_back(best_sq);

    const double stop_sq = cfg.stop_tol * cfg.stop_tol;
    double prev_sq = best_sq;
    std::size_t stagnant = 0;
    std::size_t iters = 0;
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        ++iters;
        // H <- H .* (W^T S) ./ (W^T W H)
        Matrix<double> wt = w.transpose();
        Matrix<double> num_h = wt * s;
        Matrix<double> den_h = (wt * w) * h;
        for (index_t i = 0; i < r; ++i)
            for (index_t j = 0; j < n; ++j)
                h(i, j) *= num_h(i, j) / std::max(den_h(i, j), kFloor);
        // W <- W .* (S H^T) ./ (W H H^T)
        Matrix<double> ht = h.transpose();
        Matrix<double> num_w = s * ht;
        Matrix<double> den_w = w * (h * ht);
        for (index_t i = 0; i < m; ++i)
            for (index_t j = 0; j < r; ++j)
                w(i, j) *= num_w(i, j) / std::max(den_w(i, j), kFloor);

        double sq = detail::mu_residual_sq(s, w, h);
        history.push_back(sq);
        if (sq < best_sq) {
            best_sq = sq;
            best_w = w;
            best_h = h;
        }
        if (best_sq <= stop_sq) break;
        // Stop once the loss has stalled for a while.
        if (prev_sq - sq <= 1e-14 * (1.0 + prev_sq)) {
            if (++stagnant >= 50) break;
        } else {
            stagnant = 0;
        }
        prev_sq = sq;
    }

    // Polish phase: block-coordinate descent with exact active-set NNLS,
    // starting from the best multiplicative iterate.  Each candidate column
    // (row) is accepted only when it does not worsen that subproblem's
    // residual, so the loss is non-increasing even when the active-set
    // solver stops early on an ill-conditioned subproblem.
    if (best_sq > stop_sq && cfg.polish_rounds > 0) {
        w = best_w;
        h = best_h;
        auto column_residual_sq = [&](index_t j) {
            double acc = 0.0;
            for (index_t i = 0; i < m; ++i) {
                double fit = 0.0;
                for (index_t k = 0; k < r; ++k) fit += w(i, k) * h(k, j);
                double d = fit - s(i, j);
                acc += d * d;
            }
            return acc;
        };
        auto row_residual_sq = [&](index_t i) {
            double acc = 0.0;
            for (index_t j = 0; j < n; ++j) {
                double fit = 0.0;
                for (index_t k = 0; k < r; ++k) fit += w(i, k) * h(k, j);
                double d = fit - s(i, j);
                acc += d * d;
            }
            return acc;
        };
        for (std::size_t round = 0; round < cfg.polish_rounds; ++round) {
            ++iters;
            for (index_t j = 0; j < n; ++j) {
                auto fit = nnls(w, s.column(j));
                if (fit.residual_sq <= column_residual_sq(j))
                    for (index_t i = 0; i < r; ++i) h(i, j) = fit.x[i];
            }
            Matrix<double> ht = h.transpose();
            for (index_t i = 0; i < m; ++i) {
                auto fit = nnls(ht, s.row(i));
                if (fit.residual_sq <= row_residual_sq(i))
                    for (index_t j = 0; j < r; ++j) w(i, j) = fit.x[j];
            }
            double sq = detail::mu_residual_sq(s, w, h);
            history.push_back(sq);
            bool improved = sq < best_sq;
            if (improved) {
                best_sq = sq;
                best_w = w;
                best_h = h;
            }
            if (best_sq <= stop_sq || !improved) break;
        }
    }

    if (detail_out) {
        detail_out->iterations = iters;
        detail_out->residual = std::sqrt(std::max(0.0, best_sq));
        detail_out->loss_history = std::move(history);
        detail_out->seed = cfg.seed;
    }
    return Factorization<double>(std::move(best_w), std::move(best_h));
}

inline Factorization<double> nmf_solve(const Matrix<double>& s, const SolveConfig& cfg) {
    return nmf_solve_detailed(s, cfg, nullptr);
}

// Multi-restart wrapper.  Restart i runs with seed cfg.seed + i; restarts
// are independent and run concurrently, and the merge picks the lowest
// residual with ties broken by the lowest seed index, so the outcome does
// not depend on scheduling.
inline Factorization<double> nmf_solve_best(const Matrix<double>& s, const SolveConfig& cfg,
                                            std::size_t restarts, SolveDetail* detail_out = nullptr) {
    if (restarts < 1) restarts = 1;
    std::vector<std::optional<Factorization<double>>> results(restarts);
    std::vector<SolveDetail> details(restarts);
    parallel_for(restarts, [&](std::size_t i) {
        SolveConfig c = cfg;
        c.seed = cfg.seed + i;
        results[i] = nmf_solve_detailed(s, c, &details[i]);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < restarts; ++i)
        if (details[i].residual < details[best].residual) best = i;
    if (detail_out) *detail_out = details[best];
    return std::move(*results[best]);
}

struct RankBounds {
    index_t lower = 0;
    index_t upper = 0;
    std::optional<Factorization<double>> upper_witness;
    // Scan log: (inner dimension tried, best residual over restarts).
    std::vector<std::pair<index_t, double>> scan_log;

    bool tight() const { return lower == upper; }
};

// Bounds on the nonnegative rank.  The lower bound is the linear rank; the
// upper bound starts from the trivial factorization at min(M, N) (identity
// times S) and is improved by a decreasing scan of solver attempts that
// stops at the first inner dimension where every restart misses stop_tol.
template <typename T>
RankBounds nonneg_rank_bounds(const Matrix<T>& s, const SolveConfig& cfg,
                              std::size_t restarts = 20) {
    RankBounds out;
    out.lower = rank(s);
    const index_t cap = std::min(s.rows(), s.cols());
    Matrix<double> sd = s.to_double_matrix();

    out.upper = cap;
    if (s.rows() <= s.cols())
        out.upper_witness = Factorization<double>(Matrix<double>::identity(s.rows()), sd);
    else
        out.upper_witness = Factorization<double>(sd, Matrix<double>::identity(s.cols()));

    for (index_t r = cap; r-- > out.lower && out.upper > out.lower;) {
        if (r < 1) break;
        SolveConfig c = cfg;
        c.target_rank = r;
        SolveDetail best;
        Factorization<double> f = nmf_solve_best(sd, c, restarts, &best);
        out.scan_log.emplace_back(r, best.residual);
        if (best.residual <= cfg.stop_tol) {
            out.upper = r;
            out.upper_witness = std::move(f);
        } else {
            break;
        }
    }
    return out;
}

}  // namespace nmfid

#endif  // NMFID_SOLVE_HPP
