#pragma once

#include "fls/dense.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace fls {

//! Descriptive metadata carried with a problem (written to meta.txt).
struct ProblemMeta {
    std::size_t sparsity = 0;             // s, nonzeros of the generated ground truth (0 = unknown)
    std::optional<std::uint64_t> seed;    // generator seed, when generated
    std::string source = "user";          // "gaussian", "wine", ...
};

//!
//! Factorized system A B x = b with A (m x l), B (l x n), rank(A) = rank(B) = l.
//! Construction validates shapes, the rank assumption (QR of A and B^T) and,
//! when a ground truth is supplied, the consistency flag:
//!   consistent:   ||A B x* - b|| <= 1e-10 ||b||
//!   inconsistent: ||B^T A^T (b - A B x*)|| <= 1e-8 ||A||_F ||B||_F ||b||
//!
class FactorizedProblem {
public:
    FactorizedProblem(DenseMatrix A, DenseMatrix B, Vector b, std::optional<Vector> x_star, bool consistent,
                      ProblemMeta meta = {});

    const DenseMatrix& A() const noexcept { return A_; }
    const DenseMatrix& B() const noexcept { return B_; }
    const Vector& b() const noexcept { return b_; }
    const std::optional<Vector>& x_star() const noexcept { return x_star_; }
    bool consistent() const noexcept { return consistent_; }
    const ProblemMeta& meta() const noexcept { return meta_; }

    std::size_t m() const noexcept { return A_.rows(); }
    std::size_t l() const noexcept { return A_.cols(); }
    std::size_t n() const noexcept { return B_.cols(); }

    //! C = A B when it has been materialized
    const std::optional<DenseMatrix>& full_matrix() const noexcept { return C_; }
    //! materializes C = A B (idempotent); needed by the full-system baselines
    const DenseMatrix& ensure_full_matrix();

    std::string describe() const;

private:
    DenseMatrix A_;
    DenseMatrix B_;
    Vector b_;
    std::optional<Vector> x_star_;
    bool consistent_;
    ProblemMeta meta_;
    std::optional<DenseMatrix> C_;
};

} // namespace fls
