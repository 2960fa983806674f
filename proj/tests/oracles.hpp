#pragma once

// Reference computations used only by the tests. They are written
// independently of the library kernels (row-major loops, brute force).

#include "fls/dense.hpp"
#include "fls/sampling.hpp"

#include <cmath>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline Rows to_rows(const fls::DenseMatrix& M) {
    Rows r(M.rows(), std::vector<double>(M.cols()));
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j) r[i][j] = M(i, j);
    return r;
}

inline std::vector<double> matvec(const Rows& M, const std::vector<double>& v) {
    std::vector<double> out(M.size(), 0.0);
    for (std::size_t i = 0; i < M.size(); ++i) {
        long double s = 0.0L;
        for (std::size_t j = 0; j < v.size(); ++j) s += static_cast<long double>(M[i][j]) * v[j];
        out[i] = static_cast<double>(s);
    }
    return out;
}

inline Rows product(const Rows& A, const Rows& B) {
    Rows C(A.size(), std::vector<double>(B.front().size(), 0.0));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < B.front().size(); ++j) {
            long double s = 0.0L;
            for (std::size_t p = 0; p < B.size(); ++p) s += static_cast<long double>(A[i][p]) * B[p][j];
            C[i][j] = static_cast<double>(s);
        }
    return C;
}

inline double norm(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double t : v) s += static_cast<long double>(t) * t;
    return std::sqrt(static_cast<double>(s));
}

//! sup_y <z, y> - (1/2 y^2 + lambda |y|) per component, by grid search on [-lo, lo]
inline double conjugate_by_grid(const std::vector<double>& z, double lambda, double lo = 5.0, double step = 1e-4) {
    double total = 0.0;
    const long n = std::lround(2.0 * lo / step);
    for (double zi : z) {
        double best = -1e300;
        for (long t = 0; t <= n; ++t) {
            const double y = -lo + step * static_cast<double>(t);
            best = std::max(best, zi * y - (0.5 * y * y + lambda * std::abs(y)));
        }
        total += best;
    }
    return total;
}

//! Sum_{i=0}^{k-1} alpha^{k-i} q^i by direct powers
inline double finite_sum(double alpha, double q, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        s += std::pow(alpha, static_cast<double>(k - i)) * std::pow(q, static_cast<double>(i));
    return s;
}

inline fls::DenseMatrix gaussian(std::size_t rows, std::size_t cols, fls::Rng& rng) {
    std::vector<double> d(rows * cols);
    for (double& v : d) v = rng.normal();
    return fls::DenseMatrix(rows, cols, std::move(d));
}

inline std::vector<double> gaussian_vector(std::size_t n, fls::Rng& rng) {
    std::vector<double> v(n);
    for (double& t : v) t = rng.normal();
    return v;
}

} // namespace oracle
