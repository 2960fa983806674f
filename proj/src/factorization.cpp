#include "fls/factorization.hpp"

#include <algorithm>
#include <cmath>

namespace fls {

HouseholderQr::HouseholderQr(const DenseMatrix& M)
    : rows_(M.rows()), cols_(M.cols()), work_(M.data().begin(), M.data().end()),
      vhead_(M.cols()), beta_(M.cols()), sign_(M.cols(), 1.0) {
    if (rows_ < cols_)
        throw DimensionError("HouseholderQr: needs rows >= cols (got " + std::to_string(rows_) + "x" +
                             std::to_string(cols_) + ")");
    const double threshold = 1e-12 * std::sqrt(M.frobenius_sq());
    const std::size_t m = rows_;

    for (std::size_t k = 0; k < cols_; ++k) {
        double* col = work_.data() + k * m;
        double norm_sq = 0.0;
        for (std::size_t i = k; i < m; ++i) norm_sq += col[i] * col[i];
        const double norm = std::sqrt(norm_sq);
        if (!(norm > threshold))
            throw RankDeficientError("HouseholderQr: matrix is numerically rank deficient at column " +
                                     std::to_string(k + 1) + " (|R_kk| = " + std::to_string(norm) +
                                     "); full rank is required");

        const double alpha = col[k] >= 0.0 ? -norm : norm;
        const double v0 = col[k] - alpha;
        // v = (v0, col[k+1..m)); v^T v = v0^2 + (norm^2 - col[k]^2)
        const double vtv = v0 * v0 + (norm_sq - col[k] * col[k]);
        vhead_[k] = v0;
        beta_[k] = vtv > 0.0 ? 2.0 / vtv : 0.0;

        for (std::size_t j = k + 1; j < cols_; ++j) {
            double* cj = work_.data() + j * m;
            double s = v0 * cj[k];
            for (std::size_t i = k + 1; i < m; ++i) s += col[i] * cj[i];
            s *= beta_[k];
            cj[k] -= s * v0;
            for (std::size_t i = k + 1; i < m; ++i) cj[i] -= s * col[i];
        }
        col[k] = alpha;
        sign_[k] = alpha < 0.0 ? -1.0 : 1.0;
    }
}

void HouseholderQr::apply_reflector(std::size_t k, std::span<double> v) const {
    const double* tail = work_.data() + k * rows_;
    double s = vhead_[k] * v[k];
    for (std::size_t i = k + 1; i < rows_; ++i) s += tail[i] * v[i];
    s *= beta_[k];
    v[k] -= s * vhead_[k];
    for (std::size_t i = k + 1; i < rows_; ++i) v[i] -= s * tail[i];
}

Vector HouseholderQr::apply_qt(std::span<const double> v) const {
    require_same_size(v.size(), rows_, "HouseholderQr::apply_qt");
    Vector out(v.begin(), v.end());
    for (std::size_t k = 0; k < cols_; ++k) apply_reflector(k, out);
    for (std::size_t k = 0; k < cols_; ++k) out[k] *= sign_[k];
    return out;
}

Vector HouseholderQr::apply_q(std::span<const double> v) const {
    require_same_size(v.size(), rows_, "HouseholderQr::apply_q");
    Vector out(v.begin(), v.end());
    for (std::size_t k = 0; k < cols_; ++k) out[k] *= sign_[k];
    for (std::size_t k = cols_; k-- > 0;) apply_reflector(k, out);
    return out;
}

DenseMatrix HouseholderQr::r() const {
    return DenseMatrix::from_function(cols_, cols_, [&](std::size_t i, std::size_t j) {
        return i <= j ? sign_[i] * work_[j * rows_ + i] : 0.0;
    });
}

DenseMatrix HouseholderQr::thin_q() const {
    std::vector<double> q(rows_ * cols_);
    Vector e(rows_);
    for (std::size_t j = 0; j < cols_; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        const Vector c = apply_q(e);
        std::copy(c.begin(), c.end(), q.begin() + static_cast<std::ptrdiff_t>(j * rows_));
    }
    return DenseMatrix(rows_, cols_, std::move(q));
}

DenseMatrix HouseholderQr::full_q() const {
    std::vector<double> q(rows_ * rows_);
    Vector e(rows_);
    for (std::size_t j = 0; j < rows_; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        const Vector c = apply_q(e);
        std::copy(c.begin(), c.end(), q.begin() + static_cast<std::ptrdiff_t>(j * rows_));
    }
    return DenseMatrix(rows_, rows_, std::move(q));
}

Vector HouseholderQr::solve_least_squares(std::span<const double> rhs) const {
    Vector qtb = apply_qt(rhs);
    Vector y(cols_);
    for (std::size_t i = cols_; i-- > 0;) {
        double s = qtb[i];
        for (std::size_t j = i + 1; j < cols_; ++j) s -= sign_[i] * work_[j * rows_ + i] * y[j];
        y[i] = s / (sign_[i] * work_[i * rows_ + i]);
    }
    return y;
}

Vector HouseholderQr::solve_rt(std::span<const double> v) const {
    require_same_size(v.size(), cols_, "HouseholderQr::solve_rt");
    Vector w(cols_);
    for (std::size_t i = 0; i < cols_; ++i) {
        double s = v[i];
        for (std::size_t j = 0; j < i; ++j) s -= sign_[j] * work_[i * rows_ + j] * w[j];
        w[i] = s / (sign_[i] * work_[i * rows_ + i]);
    }
    return w;
}

Vector least_squares_solve(const DenseMatrix& M, std::span<const double> rhs) {
    return HouseholderQr(M).solve_least_squares(rhs);
}

Vector min_norm_solve(const DenseMatrix& B, std::span<const double> y) {
    require_same_size(y.size(), B.rows(), "min_norm_solve");
    // B^T = Q R  =>  B = R^T Q^T; the minimum-norm solution is Q (R^T)^{-1} y
    const HouseholderQr qr(B.transposed());
    Vector w = qr.solve_rt(y);
    w.resize(B.cols(), 0.0);
    return qr.apply_q(w);
}

DenseMatrix null_space_of_transpose(const DenseMatrix& M) {
    const HouseholderQr qr(M);
    const std::size_t m = M.rows();
    const std::size_t k = m - M.cols();
    std::vector<double> n(m * k);
    Vector e(m);
    for (std::size_t j = 0; j < k; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[M.cols() + j] = 1.0;
        const Vector c = qr.apply_q(e);
        std::copy(c.begin(), c.end(), n.begin() + static_cast<std::ptrdiff_t>(j * m));
    }
    return DenseMatrix(m, k, std::move(n));
}

RowSpaceProjector::RowSpaceProjector(const DenseMatrix& M) : q_(HouseholderQr(M.transposed()).thin_q()) {}

Vector RowSpaceProjector::null_component(std::span<const double> z) const {
    const Vector coeffs = matvec_transposed(q_, z);
    Vector out(z.begin(), z.end());
    axpy(-1.0, matvec(q_, coeffs), out);
    return out;
}

Vector symmetric_eigenvalues(const DenseMatrix& S) {
    if (S.rows() != S.cols()) throw DimensionError("symmetric_eigenvalues: matrix must be square");
    const std::size_t n = S.rows();
    std::vector<double> a(S.data().begin(), S.data().end());
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[j * n + i]; };

    const double tol = 1e-12 * std::sqrt(S.frobenius_sq());
    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                if (i != j) s += at(i, j) * at(i, j);
        return std::sqrt(s);
    };

    constexpr int max_sweeps = 100;
    int sweep = 0;
    while (off_norm() >= tol && tol > 0.0) {
        if (sweep++ == max_sweeps)
            throw ConvergenceError("symmetric_eigenvalues: Jacobi did not converge in 100 sweeps");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Vector eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

double sigma_min(const DenseMatrix& M) {
    const bool tall = M.rows() >= M.cols();
    const std::size_t k = tall ? M.cols() : M.rows();
    // Gram matrix of the smaller side
    std::vector<double> g(k * k);
    if (tall) {
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i <= j; ++i) g[j * k + i] = g[i * k + j] = dot(M.column(i), M.column(j));
    } else {
        std::vector<Vector> rows(k);
        for (std::size_t i = 0; i < k; ++i) rows[i] = M.row(i);
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i <= j; ++i) g[j * k + i] = g[i * k + j] = dot(rows[i], rows[j]);
    }
    const Vector eig = symmetric_eigenvalues(DenseMatrix(k, k, std::move(g)));
    const double smallest = std::sqrt(std::max(eig.front(), 0.0));
    if (!(smallest > 1e-12 * std::sqrt(M.frobenius_sq())))
        throw RankDeficientError("sigma_min: matrix is numerically rank deficient");
    return smallest;
}

} // namespace fls
