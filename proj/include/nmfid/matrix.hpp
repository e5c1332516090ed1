#ifndef NMFID_MATRIX_HPP
#define NMFID_MATRIX_HPP

#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nmfid/scalar.hpp"

namespace nmfid {

using index_t = std::size_t;

// Dense row-major matrix over an exact rational or a double scalar.  This is
// the signed carrier; NonnegMatrix below adds the entrywise >= 0 invariant.
// Values are treated as immutable once built, so they are safe to share
// across threads.
template <typename T>
class Matrix {
  public:
    Matrix(index_t rows, index_t cols, T fill = T(0))
        : rows_(rows), cols_(cols), data_(rows * cols, std::move(fill)) {
        if (rows_ == 0 || cols_ == 0)
            throw std::invalid_argument("matrix dimensions must be at least 1x1");
    }

    template <typename U>
    static Matrix from_rows(std::initializer_list<std::initializer_list<U>> rows) {
        if (rows.size() == 0) throw std::invalid_argument("empty row list");
        index_t cols = rows.begin()->size();
        Matrix m(rows.size(), cols);
        index_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != cols) throw std::invalid_argument("ragged row list");
            index_t j = 0;
            for (const auto& v : row) m(i, j++) = T(v);
            ++i;
        }
        return m;
    }

    static Matrix identity(index_t n) {
        Matrix m(n, n);
        for (index_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }

    T& operator()(index_t i, index_t j) { return data_[i * cols_ + j]; }
    const T& operator()(index_t i, index_t j) const { return data_[i * cols_ + j]; }

    bool operator==(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (index_t i = 0; i < rows_; ++i)
            for (index_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix operator*(const Matrix& rhs) const {
        if (cols_ != rhs.rows_) throw std::invalid_argument("dimension mismatch in product");
        Matrix out(rows_, rhs.cols_);
        for (index_t i = 0; i < rows_; ++i)
            for (index_t k = 0; k < cols_; ++k) {
                const T& a = (*this)(i, k);
                if (a == T(0)) continue;
                for (index_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
            }
        return out;
    }

    Matrix operator+(const Matrix& rhs) const { return zipped(rhs, true); }
    Matrix operator-(const Matrix& rhs) const { return zipped(rhs, false); }

    Matrix scaled(const T& factor) const {
        Matrix out(*this);
        for (T& v : out.data_) v *= factor;
        return out;
    }

    std::vector<T> column(index_t j) const {
        std::vector<T> out(rows_);
        for (index_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
        return out;
    }

    std::vector<T> row(index_t i) const {
        std::vector<T> out(cols_);
        for (index_t j = 0; j < cols_; ++j) out[j] = (*this)(i, j);
        return out;
    }

    Matrix select_rows(std::span<const index_t> idx) const {
        Matrix out(idx.size(), cols_);
        for (index_t i = 0; i < idx.size(); ++i)
            for (index_t j = 0; j < cols_; ++j) out(i, j) = (*this)(idx[i], j);
        return out;
    }

    Matrix select_cols(std::span<const index_t> idx) const {
        Matrix out(rows_, idx.size());
        for (index_t i = 0; i < rows_; ++i)
            for (index_t j = 0; j < idx.size(); ++j) out(i, j) = (*this)(i, idx[j]);
        return out;
    }

    // [this | rhs] side by side.
    Matrix augment_cols(const Matrix& rhs) const {
        if (rows_ != rhs.rows_) throw std::invalid_argument("dimension mismatch in augment");
        Matrix out(rows_, cols_ + rhs.cols_);
        for (index_t i = 0; i < rows_; ++i) {
            for (index_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
            for (index_t j = 0; j < rhs.cols_; ++j) out(i, cols_ + j) = rhs(i, j);
        }
        return out;
    }

    T max_abs() const {
        T best(0);
        for (const T& v : data_) {
            T a = abs_value(v);
            if (a > best) best = a;
        }
        return best;
    }

    T frobenius_sq() const {
        T sum(0);
        for (const T& v : data_) sum += v * v;
        return sum;
    }

    bool all_nonneg() const {
        for (const T& v : data_)
            if (v < T(0)) return false;
        return true;
    }

    template <typename U>
    Matrix<U> cast() const {
        Matrix<U> out(rows_, cols_);
        for (index_t i = 0; i < rows_; ++i)
            for (index_t j = 0; j < cols_; ++j) out(i, j) = U((*this)(i, j));
        return out;
    }

    Matrix<double> to_double_matrix() const {
        Matrix<double> out(rows_, cols_);
        for (index_t i = 0; i < rows_; ++i)
            for (index_t j = 0; j < cols_; ++j) out(i, j) = to_double((*this)(i, j));
        return out;
    }

  private:
    Matrix zipped(const Matrix& rhs, bool add) const {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            throw std::invalid_argument("dimension mismatch");
        Matrix out(rows_, cols_);
        for (index_t k = 0; k < data_.size(); ++k) {
            if (add)
                out.data_[k] = data_[k] + rhs.data_[k];
            else
                out.data_[k] = data_[k] - rhs.data_[k];
        }
        return out;
    }

    index_t rows_;
    index_t cols_;
    std::vector<T> data_;
};

// Entrywise nonnegative matrix; the constraint is checked on construction.
template <typename T>
class NonnegMatrix : public Matrix<T> {
  public:
    explicit NonnegMatrix(Matrix<T> m) : Matrix<T>(std::move(m)) {
        if (!this->all_nonneg())
            throw std::invalid_argument("matrix has a negative entry");
    }

    NonnegMatrix(index_t rows, index_t cols, T fill = T(0)) : Matrix<T>(rows, cols, fill) {
        if (fill < T(0)) throw std::invalid_argument("matrix has a negative entry");
    }

    template <typename U>
    static NonnegMatrix from_rows(std::initializer_list<std::initializer_list<U>> rows) {
        return NonnegMatrix(Matrix<T>::from_rows(rows));
    }

    static NonnegMatrix identity(index_t n) { return NonnegMatrix(Matrix<T>::identity(n)); }
};

template <typename T>
std::ostream& operator<<(std::ostream& os, const Matrix<T>& m) {
    for (index_t i = 0; i < m.rows(); ++i) {
        for (index_t j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << format_scalar(m(i, j));
        }
        os << '\n';
    }
    return os;
}

// Support threshold for zero tests: exact mode compares against literal
// zero, float mode against tol * (largest magnitude in the matrix).
template <typename T>
double support_threshold(const Matrix<T>& m, double tol) {
    if constexpr (is_exact_v<T>) {
        (void)m;
        (void)tol;
        return 0.0;
    } else {
        return tol * m.max_abs();
    }
}

template <typename T>
bool entry_nonzero(const T& v, double threshold) {
    if constexpr (is_exact_v<T>)
        return v != T(0);
    else
        return std::fabs(v) > threshold;
}

}  // namespace nmfid

#endif  // NMFID_MATRIX_HPP
