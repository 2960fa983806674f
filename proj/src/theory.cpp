#include "fls/theory.hpp"

#include "fls/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fls {

double alpha_of(const DenseMatrix& A) {
    const double s = sigma_min(A);
    return 1.0 - s * s / A.frobenius_sq();
}

double nu_quadratic(const DenseMatrix& B) {
    const double s = sigma_min(B);
    return 2.0 * s * s;
}

double beta_of(double nu, double gamma, double b_frob_sq) { return 1.0 - gamma * nu / (2.0 * b_frob_sq); }

double default_delta(double rho, double gamma) { return gamma * (1.0 / rho - 1.0) / 2.0; }

RateConstants rate_constants(const DenseMatrix& A, const DenseMatrix& B, double gamma, double nu,
                             std::optional<double> delta) {
    RateConstants c;
    c.gamma = gamma;
    c.nu = nu;
    c.alpha = alpha_of(A);
    c.beta = beta_of(nu, gamma, B.frobenius_sq());
    c.rho = std::max(c.alpha, c.beta);
    c.delta = delta.value_or(default_delta(c.rho, gamma));
    if (!(nu > 0.0)) c.warnings.push_back("nu <= 0: beta >= 1, the bound does not contract");
    if (gamma * nu > 2.0 * B.frobenius_sq())
        c.warnings.push_back("gamma * nu > 2 ||B||_F^2: beta < 0, nu is inconsistent with B");
    return c;
}

double norm_factor_consistent(const DenseMatrix& A, std::span<const double> b) {
    return norm2_sq(least_squares_solve(A, b));
}

double norm_factor_inconsistent(const DenseMatrix& A, std::span<const double> b) {
    const Vector y = least_squares_solve(A, b);
    const double s = sigma_min(A);
    return norm2_sq(matvec(A, y)) / (s * s);
}

namespace {

void check_delta(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("theorem_bound: delta must be positive");
}

} // namespace

std::vector<double> theorem_bound_series(const RateConstants& c, double d0, double lhs_norm_sq,
                                         double b_frob_sq, double gamma, std::size_t k_max) {
    check_delta(c.delta);
    const double q = (1.0 + c.delta / gamma) * c.beta;
    const double weight = (c.delta + gamma) * gamma / (2.0 * c.delta * b_frob_sq) * lhs_norm_sq;

    std::vector<double> out;
    out.reserve(k_max + 1);
    double qk = 1.0;   // q^k
    double sum = 0.0;  // Sum_{i=0}^{k-1} alpha^{k-i} q^i
    out.push_back(d0);
    for (std::size_t k = 1; k <= k_max; ++k) {
        // S_k = alpha (S_{k-1} + q^{k-1})
        sum = c.alpha * (sum + qk);
        qk *= q;
        out.push_back(qk * d0 + weight * sum);
    }
    return out;
}

double theorem_bound(const RateConstants& c, double d0, double lhs_norm_sq, double b_frob_sq, double gamma,
                     std::size_t k) {
    return theorem_bound_series(c, d0, lhs_norm_sq, b_frob_sq, gamma, k).back();
}

double simplified_bound(const RateConstants& c, double d0, double lhs_norm_sq, double b_frob_sq, double gamma,
                        std::size_t k) {
    check_delta(c.delta);
    const double rate = (1.0 + c.delta / gamma) * c.rho;
    if (!(rate < 1.0)) {
        std::ostringstream os;
        os << "simplified_bound: (1 + delta/gamma) rho = " << rate << " >= 1; delta must lie in (0, "
           << gamma * (1.0 / c.rho - 1.0) << ")";
        throw std::domain_error(os.str());
    }
    const double weight = (c.delta + gamma) * gamma * gamma / (2.0 * c.delta * c.delta * b_frob_sq);
    return std::pow(rate, static_cast<double>(k)) * (d0 + weight * lhs_norm_sq);
}

} // namespace fls
