#pragma once

#include "fls/dense.hpp"

#include <span>
#include <string>

namespace fls {

//! Componentwise max(|x_i| - lambda, 0) * sgn(x_i). Throws on lambda < 0.
Vector soft_shrinkage(std::span<const double> x, double lambda);
void soft_shrinkage_into(std::span<const double> x, double lambda, std::span<double> out);

enum class RegularizerKind { Quadratic, ElasticNetL1 };

//!
//! Strongly convex objective f together with its conjugate f* and the
//! gradient map grad f*. Two kinds are provided:
//!   Quadratic        f(x) = 1/2 ||x||^2                 grad f*(z) = z
//!   ElasticNetL1     f(x) = 1/2 ||x||^2 + lambda ||x||_1 grad f*(z) = S_lambda(z)
//! Both are 1-strongly convex. Stateless value type.
//!
class Regularizer {
public:
    static Regularizer quadratic() noexcept { return Regularizer(RegularizerKind::Quadratic, 0.0); }
    //! throws std::invalid_argument on lambda < 0
    static Regularizer elastic_net(double lambda);

    RegularizerKind kind() const noexcept { return kind_; }
    double lambda() const noexcept { return lambda_; }
    //! strong-convexity modulus; also the RRK step multiplier
    double gamma() const noexcept { return 1.0; }
    std::string name() const;

    double value(std::span<const double> x) const;
    double conjugate(std::span<const double> z) const;
    Vector grad_conjugate(std::span<const double> z) const;
    void grad_conjugate_into(std::span<const double> z, std::span<double> out) const;

private:
    Regularizer(RegularizerKind kind, double lambda) noexcept : kind_(kind), lambda_(lambda) {}

    RegularizerKind kind_;
    double lambda_;
};

//!
//! Bregman distance D_{f,z}(grad f*(z), target) evaluated through the
//! conjugate: f(target) + f*(z) - <z, target>. The caller must pass the dual
//! iterate z of the current primal point.
//!
double bregman_distance(const Regularizer& f, std::span<const double> z, std::span<const double> target);

} // namespace fls
