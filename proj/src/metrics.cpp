#include "fls/metrics.hpp"

#include <stdexcept>

namespace fls {

namespace {

Vector residual(const FactorizedProblem& p, std::span<const double> x) {
    return subtract(p.b(), matvec(p.A(), matvec(p.B(), x)));
}

Vector normal_map(const FactorizedProblem& p, std::span<const double> v) {
    return matvec_transposed(p.B(), matvec_transposed(p.A(), v));
}

} // namespace

double rel_residual_consistent(const FactorizedProblem& p, std::span<const double> x) {
    const double bnorm = norm2(p.b());
    if (!(bnorm > 0.0)) throw std::invalid_argument("rel_residual_consistent: b is zero");
    return norm2(residual(p, x)) / bnorm;
}

double rel_residual_normal(const FactorizedProblem& p, std::span<const double> x) {
    const double denom = norm2(normal_map(p, p.b()));
    if (!(denom > 0.0)) throw std::invalid_argument("rel_residual_normal: B^T A^T b is zero");
    return norm2(normal_map(p, residual(p, x))) / denom;
}

double rel_residual(const FactorizedProblem& p, std::span<const double> x) {
    return p.consistent() ? rel_residual_consistent(p, x) : rel_residual_normal(p, x);
}

double rel_error(std::span<const double> x, std::span<const double> x_star) {
    const double denom = norm2(x_star);
    if (!(denom > 0.0)) throw std::invalid_argument("rel_error: x* is zero");
    return norm2(subtract(x, x_star)) / denom;
}

} // namespace fls
