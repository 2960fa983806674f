#pragma once

#include "fls/dense.hpp"

#include <vector>

namespace fls {

//!
//! Householder QR of a tall matrix (rows >= cols), normalized so that
//! diag(R) > 0. Reflectors are kept in compact form; Q is only formed on
//! request. Construction throws RankDeficientError when some |R(k,k)| falls
//! below 1e-12 * ||M||_F.
//!
class HouseholderQr {
public:
    explicit HouseholderQr(const DenseMatrix& M);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    //! cols x cols upper triangular factor
    DenseMatrix r() const;
    //! rows x cols orthonormal factor
    DenseMatrix thin_q() const;
    //! rows x rows orthogonal factor; trailing rows-cols columns span null(M^T)
    DenseMatrix full_q() const;

    //! Q^T v for the full Q (length rows)
    Vector apply_qt(std::span<const double> v) const;
    //! Q v for the full Q (length rows)
    Vector apply_q(std::span<const double> v) const;

    //! argmin ||rhs - M y||
    Vector solve_least_squares(std::span<const double> rhs) const;
    //! solves R^T w = v (forward substitution), v of length cols
    Vector solve_rt(std::span<const double> v) const;

private:
    void apply_reflector(std::size_t k, std::span<double> v) const;

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> work_;   // column-major; R in upper triangle, reflector tails below
    std::vector<double> vhead_;  // leading entry of each reflector
    std::vector<double> beta_;   // 2 / (v^T v)
    std::vector<double> sign_;   // +-1 so that diag(R) > 0
};

//! M^dagger rhs for full column rank M
Vector least_squares_solve(const DenseMatrix& M, std::span<const double> rhs);

//! minimum-norm solution of B x = y for full row rank B (l x n, l <= n)
Vector min_norm_solve(const DenseMatrix& B, std::span<const double> y);

//! orthonormal basis of null(M^T) for full column rank M (rows x (rows - cols))
DenseMatrix null_space_of_transpose(const DenseMatrix& M);

//!
//! Orthogonal split against ran(M^T) for a full row rank M (l x n): the
//! component of z in null(M) is z - Q Q^T z with Q the thin Q of M^T.
//!
class RowSpaceProjector {
public:
    explicit RowSpaceProjector(const DenseMatrix& M);
    Vector null_component(std::span<const double> z) const;

private:
    DenseMatrix q_;
};

//! eigenvalues (ascending) of a symmetric matrix by cyclic Jacobi rotations,
//! stopping once the off-diagonal norm is below 1e-12 * ||S||_F; at most 100 sweeps
Vector symmetric_eigenvalues(const DenseMatrix& S);

//! smallest nonzero singular value of a full-rank matrix, via the Gram
//! matrix of its smaller side
double sigma_min(const DenseMatrix& M);

} // namespace fls
