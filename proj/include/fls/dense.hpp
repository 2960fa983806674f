#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fls {

using Vector = std::vector<double>;

//! Raised when operand shapes do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

//! Raised when a factor violates the full-rank assumption rank(A) = rank(B) = l.
class RankDeficientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//! Raised when an iterative kernel (Jacobi sweeps) fails to converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//!
//! Dense real matrix stored column-major. Immutable once built; squared row,
//! column and Frobenius norms are computed at construction because every
//! sampling step needs them.
//!
class DenseMatrix {
public:
    DenseMatrix() = default;

    //! rows x cols zero matrix
    DenseMatrix(std::size_t rows, std::size_t cols);

    //! takes ownership of column-major data; data.size() must equal rows*cols
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> col_major);

    //! row-major nested initializer, e.g. {{1, 2}, {3, 4}}
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static DenseMatrix from_row_major(std::size_t rows, std::size_t cols, std::span<const double> data);
    static DenseMatrix from_function(std::size_t rows, std::size_t cols,
                                     const std::function<double(std::size_t, std::size_t)>& entry);
    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

    //! contiguous view of column j
    std::span<const double> column(std::size_t j) const;
    //! copy of row i (strided read)
    Vector row(std::size_t i) const;
    std::span<const double> data() const noexcept { return data_; }

    //! <M(i,:), v> without materializing the row
    double row_dot(std::size_t i, std::span<const double> v) const;
    //! <M(:,j), v>
    double col_dot(std::size_t j, std::span<const double> v) const;
    //! y += alpha * M(i,:)^T
    void row_axpy(std::size_t i, double alpha, std::span<double> y) const;
    //! y += alpha * M(:,j)
    void col_axpy(std::size_t j, double alpha, std::span<double> y) const;

    double row_norm_sq(std::size_t i) const { return row_norms_sq_.at(i); }
    double col_norm_sq(std::size_t j) const { return col_norms_sq_.at(j); }
    std::span<const double> row_norms_sq() const noexcept { return row_norms_sq_; }
    std::span<const double> col_norms_sq() const noexcept { return col_norms_sq_; }
    double frobenius_sq() const noexcept { return frob_sq_; }

    DenseMatrix transposed() const;

private:
    void compute_norms();

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
    std::vector<double> row_norms_sq_;
    std::vector<double> col_norms_sq_;
    double frob_sq_ = 0.0;
};

//! M * v
Vector matvec(const DenseMatrix& M, std::span<const double> v);
//! M^T * v
Vector matvec_transposed(const DenseMatrix& M, std::span<const double> v);
//! M * N
DenseMatrix multiply(const DenseMatrix& M, const DenseMatrix& N);

double dot(std::span<const double> a, std::span<const double> b);
double norm2_sq(std::span<const double> v);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);
//! y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scaled(std::span<const double> v, double alpha);

//! throws DimensionError with `what` prefixed when a != b
void require_same_size(std::size_t a, std::size_t b, const std::string& what);

} // namespace fls
