#include "fls/regularizer.hpp"

#include <cmath>
#include <stdexcept>

namespace fls {

void soft_shrinkage_into(std::span<const double> x, double lambda, std::span<double> out) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("soft_shrinkage: lambda must be non-negative");
    require_same_size(x.size(), out.size(), "soft_shrinkage");
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = x[i];
        if (t > lambda)
            out[i] = t - lambda;
        else if (t < -lambda)
            out[i] = t + lambda;
        else
            out[i] = 0.0;
    }
}

Vector soft_shrinkage(std::span<const double> x, double lambda) {
    Vector out(x.size());
    soft_shrinkage_into(x, lambda, out);
    return out;
}

Regularizer Regularizer::elastic_net(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("elastic-net regularizer: lambda must be finite and non-negative");
    return Regularizer(RegularizerKind::ElasticNetL1, lambda);
}

std::string Regularizer::name() const {
    if (kind_ == RegularizerKind::Quadratic) return "quadratic";
    return "l1(lambda=" + std::to_string(lambda_) + ")";
}

double Regularizer::value(std::span<const double> x) const {
    double v = 0.5 * norm2_sq(x);
    if (kind_ == RegularizerKind::ElasticNetL1) {
        double l1 = 0.0;
        for (double t : x) l1 += std::abs(t);
        v += lambda_ * l1;
    }
    return v;
}

double Regularizer::conjugate(std::span<const double> z) const {
    if (kind_ == RegularizerKind::Quadratic) return 0.5 * norm2_sq(z);
    double s = 0.0;
    for (double t : z) {
        const double shrunk = std::max(std::abs(t) - lambda_, 0.0);
        s += shrunk * shrunk;
    }
    return 0.5 * s;
}

void Regularizer::grad_conjugate_into(std::span<const double> z, std::span<double> out) const {
    if (kind_ == RegularizerKind::Quadratic) {
        require_same_size(z.size(), out.size(), "grad_conjugate");
        std::copy(z.begin(), z.end(), out.begin());
    } else {
        soft_shrinkage_into(z, lambda_, out);
    }
}

Vector Regularizer::grad_conjugate(std::span<const double> z) const {
    Vector out(z.size());
    grad_conjugate_into(z, out);
    return out;
}

double bregman_distance(const Regularizer& f, std::span<const double> z, std::span<const double> target) {
    require_same_size(z.size(), target.size(), "bregman_distance");
    if (f.kind() == RegularizerKind::Quadratic) {
        // exact form avoids cancellation: 1/2 ||z - target||^2
        double s = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) s += (z[i] - target[i]) * (z[i] - target[i]);
        return 0.5 * s;
    }
    // f(t) + f*(z) - <z, t> regrouped per component around x = S(z):
    // 1/2 (t - x)^2 + lambda (|t| - sgn(z) t) when |z| > lambda, else 1/2 t^2 + lambda |t| - z t
    const double lambda = f.lambda();
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double zi = z[i];
        const double ti = target[i];
        if (zi > lambda) {
            const double xi = zi - lambda;
            s += 0.5 * (ti - xi) * (ti - xi) + lambda * (std::abs(ti) - ti);
        } else if (zi < -lambda) {
            const double xi = zi + lambda;
            s += 0.5 * (ti - xi) * (ti - xi) + lambda * (std::abs(ti) + ti);
        } else {
            s += 0.5 * ti * ti + lambda * std::abs(ti) - zi * ti;
        }
    }
    return s;
}

} // namespace fls
