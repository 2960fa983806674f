#include "fls/dense.hpp"

#include <algorithm>
#include <cmath>

namespace fls {

void require_same_size(std::size_t a, std::size_t b, const std::string& what) {
    if (a != b)
        throw DimensionError(what + ": dimension mismatch (" + std::to_string(a) + " vs " +
                             std::to_string(b) + ")");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : DenseMatrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> col_major)
    : rows_(rows), cols_(cols), data_(std::move(col_major)) {
    require_same_size(data_.size(), rows * cols, "DenseMatrix data length");
    compute_norms();
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.begin()->size();
    std::vector<double> data(m * n);
    std::size_t i = 0;
    for (const auto& r : rows) {
        require_same_size(r.size(), n, "DenseMatrix::from_rows row length");
        std::size_t j = 0;
        for (double v : r) data[j++ * m + i] = v;
        ++i;
    }
    return DenseMatrix(m, n, std::move(data));
}

DenseMatrix DenseMatrix::from_row_major(std::size_t rows, std::size_t cols, std::span<const double> data) {
    require_same_size(data.size(), rows * cols, "DenseMatrix::from_row_major");
    std::vector<double> cm(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) cm[j * rows + i] = data[i * cols + j];
    return DenseMatrix(rows, cols, std::move(cm));
}

DenseMatrix DenseMatrix::from_function(std::size_t rows, std::size_t cols,
                                       const std::function<double(std::size_t, std::size_t)>& entry) {
    std::vector<double> cm(rows * cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) cm[j * rows + i] = entry(i, j);
    return DenseMatrix(rows, cols, std::move(cm));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    return from_function(n, n, [](std::size_t i, std::size_t j) { return i == j ? 1.0 : 0.0; });
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
    return from_function(d.size(), d.size(),
                         [&](std::size_t i, std::size_t j) { return i == j ? d[i] : 0.0; });
}

void DenseMatrix::compute_norms() {
    row_norms_sq_.assign(rows_, 0.0);
    col_norms_sq_.assign(cols_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) {
        const double* c = data_.data() + j * rows_;
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double sq = c[i] * c[i];
            s += sq;
            row_norms_sq_[i] += sq;
        }
        col_norms_sq_[j] = s;
    }
    frob_sq_ = 0.0;
    for (double s : col_norms_sq_) frob_sq_ += s;
}

std::span<const double> DenseMatrix::column(std::size_t j) const {
    if (j >= cols_) throw std::out_of_range("DenseMatrix::column index out of range");
    return {data_.data() + j * rows_, rows_};
}

Vector DenseMatrix::row(std::size_t i) const {
    if (i >= rows_) throw std::out_of_range("DenseMatrix::row index out of range");
    Vector r(cols_);
    for (std::size_t j = 0; j < cols_; ++j) r[j] = data_[j * rows_ + i];
    return r;
}

double DenseMatrix::row_dot(std::size_t i, std::span<const double> v) const {
    if (i >= rows_) throw std::out_of_range("DenseMatrix::row_dot index out of range");
    require_same_size(v.size(), cols_, "row_dot");
    const double* p = data_.data() + i;
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j, p += rows_) s += *p * v[j];
    return s;
}

double DenseMatrix::col_dot(std::size_t j, std::span<const double> v) const {
    require_same_size(v.size(), rows_, "col_dot");
    return dot(column(j), v);
}

void DenseMatrix::row_axpy(std::size_t i, double alpha, std::span<double> y) const {
    if (i >= rows_) throw std::out_of_range("DenseMatrix::row_axpy index out of range");
    require_same_size(y.size(), cols_, "row_axpy");
    const double* p = data_.data() + i;
    for (std::size_t j = 0; j < cols_; ++j, p += rows_) y[j] += alpha * *p;
}

void DenseMatrix::col_axpy(std::size_t j, double alpha, std::span<double> y) const {
    require_same_size(y.size(), rows_, "col_axpy");
    axpy(alpha, column(j), y);
}

DenseMatrix DenseMatrix::transposed() const {
    std::vector<double> t(data_.size());
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t i = 0; i < rows_; ++i) t[i * cols_ + j] = data_[j * rows_ + i];
    return DenseMatrix(cols_, rows_, std::move(t));
}

Vector matvec(const DenseMatrix& M, std::span<const double> v) {
    require_same_size(v.size(), M.cols(), "matvec");
    Vector out(M.rows(), 0.0);
    for (std::size_t j = 0; j < M.cols(); ++j)
        if (v[j] != 0.0) axpy(v[j], M.column(j), out);
    return out;
}

Vector matvec_transposed(const DenseMatrix& M, std::span<const double> v) {
    require_same_size(v.size(), M.rows(), "matvec_transposed");
    Vector out(M.cols());
    for (std::size_t j = 0; j < M.cols(); ++j) out[j] = dot(M.column(j), v);
    return out;
}

DenseMatrix multiply(const DenseMatrix& M, const DenseMatrix& N) {
    require_same_size(M.cols(), N.rows(), "multiply");
    std::vector<double> out(M.rows() * N.cols(), 0.0);
    for (std::size_t j = 0; j < N.cols(); ++j) {
        std::span<double> oc(out.data() + j * M.rows(), M.rows());
        for (std::size_t p = 0; p < N.rows(); ++p) {
            const double s = N(p, j);
            if (s != 0.0) axpy(s, M.column(p), oc);
        }
    }
    return DenseMatrix(M.rows(), N.cols(), std::move(out));
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2_sq(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double norm2(std::span<const double> v) { return std::sqrt(norm2_sq(v)); }

double norm_inf(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same_size(x.size(), y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "subtract");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vector scaled(std::span<const double> v, double alpha) {
    Vector out(v.begin(), v.end());
    for (double& x : out) x *= alpha;
    return out;
}

} // namespace fls
