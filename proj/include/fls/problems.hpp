#pragma once

#include "fls/csv.hpp"
#include "fls/dense.hpp"
#include "fls/problem.hpp"
#include "fls/sampling.hpp"

#include <filesystem>
#include <vector>

namespace fls {

struct GaussianSpec {
    std::size_t m = 200;
    std::size_t l = 50;
    std::size_t n = 100;
    std::size_t s = 5;
    bool consistent = true;
};

//! largest m for which the inconsistent recipe forms the full m x m Q of A
inline constexpr std::size_t kInconsistentRowCeiling = 2000;

//!
//! Right-hand side for a given ground truth: b_hat = A B x*; consistent -> b = b_hat,
//! inconsistent -> b = b_hat + N v ||b_hat|| / ||N v|| with N an orthonormal basis of
//! null(A^T) and v standard Gaussian (length m - l), so x* stays a least-squares solution.
//!
Vector make_rhs(const DenseMatrix& A, const DenseMatrix& B, std::span<const double> x_star, bool consistent,
                Rng& rng);

//!
//! Gaussian factors A (m x l), B (l x n) with i.i.d. N(0,1) entries, an s-sparse x*
//! (uniform random support, N(0,1) values) and b from make_rhs. Draw order:
//! A column-major, B column-major, support, values, then v.
//!
FactorizedProblem gen_gaussian(const GaussianSpec& spec, Rng& rng);

struct NmfResult {
    DenseMatrix A;               // m x r, entrywise >= 0
    DenseMatrix B;               // r x n, entrywise >= 0
    std::vector<double> errors;  // ||X - A B||_F at init and after each sweep
};

//!
//! Multiplicative-update NMF for the Frobenius objective (denominators floored
//! at 1e-12). Factors start from uniform random positive entries.
//!
NmfResult nmf(const DenseMatrix& X, std::size_t rank, std::size_t sweeps, Rng& rng);

//! length-11 target with ones at 1-based positions 1, 6 and 11
Vector wine_target();

//! Red-wine table: header auto-skipped, quality column (12th) dropped, delimiter sniffed
//! from the file (the UCI distribution uses ';').
DatasetCsvOptions wine_csv_options(const std::filesystem::path& path);
DenseMatrix load_wine_csv(const std::filesystem::path& path);

//! wine CSV -> NMF(rank) -> factorized problem with the 3-sparse target
FactorizedProblem wine_problem(const DenseMatrix& X, std::size_t rank, std::size_t nmf_sweeps, bool consistent,
                               Rng& rng);

//! Problem directory: A.csv, B.csv, b.csv, optional xstar.csv, meta.txt (key=value lines)
void save_problem(const FactorizedProblem& p, const std::filesystem::path& dir);
FactorizedProblem load_problem(const std::filesystem::path& dir);

} // namespace fls
