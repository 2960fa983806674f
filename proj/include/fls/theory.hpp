#pragma once

#include "fls/dense.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fls {

//!
//! Rate constants of the combined Kaczmarz / regularized Kaczmarz analysis:
//!   alpha = 1 - sigma_min(A)^2 / ||A||_F^2          (Kaczmarz / Gauss-Seidel on A)
//!   beta  = 1 - gamma nu / (2 ||B||_F^2)            (regularized Kaczmarz on B)
//!   rho   = max(alpha, beta)
//! delta > 0 is the free splitting parameter of the expectation bound.
//!
struct RateConstants {
    double alpha = 0.0;
    double beta = 0.0;
    double nu = 0.0;
    double rho = 0.0;
    double delta = 0.0;
    double gamma = 1.0;
    std::vector<std::string> warnings;
};

double alpha_of(const DenseMatrix& A);

//! nu for f = 1/2||x||^2: 2 sigma_min(B)^2 (smallest nonzero singular value)
double nu_quadratic(const DenseMatrix& B);

double beta_of(double nu, double gamma, double b_frob_sq);

//! midpoint gamma (1/rho - 1) / 2 of the admissible interval (0, gamma (1/rho - 1))
double default_delta(double rho, double gamma);

//! Assembles the constants; delta defaults to default_delta(rho, gamma).
//! Records a warning when gamma nu > 2 ||B||_F^2 (beta < 0) or nu <= 0 (beta >= 1).
RateConstants rate_constants(const DenseMatrix& A, const DenseMatrix& B, double gamma, double nu,
                             std::optional<double> delta = std::nullopt);

//! ||A^dagger b||^2, the norm factor of the consistent-case bound
double norm_factor_consistent(const DenseMatrix& A, std::span<const double> b);
//! ||A^dagger||^2 ||A A^dagger b||^2, the norm factor of the inconsistent-case bound
double norm_factor_inconsistent(const DenseMatrix& A, std::span<const double> b);

//!
//! Exact right-hand side of the expectation bound on E[D_{f,z_k}(x_k, x*)]:
//!   q^k D0 + ((delta + gamma) gamma / (2 delta ||B||_F^2)) lhs Sum_{i=0}^{k-1} alpha^{k-i} q^i,
//! q = (1 + delta/gamma) beta. The finite sum is evaluated term by term, so
//! the value is valid even when q >= 1. Throws std::invalid_argument for delta <= 0.
//!
double theorem_bound(const RateConstants& c, double d0, double lhs_norm_sq, double b_frob_sq, double gamma,
                     std::size_t k);
//! theorem_bound for k = 0..k_max in one O(k_max) pass
std::vector<double> theorem_bound_series(const RateConstants& c, double d0, double lhs_norm_sq,
                                         double b_frob_sq, double gamma, std::size_t k_max);

//!
//! Envelope ((1 + delta/gamma) rho)^k (D0 + ((delta + gamma) gamma^2 / (2 delta^2 ||B||_F^2)) lhs).
//! Requires (1 + delta/gamma) rho < 1; otherwise throws std::domain_error naming
//! the admissible delta interval.
//!
double simplified_bound(const RateConstants& c, double d0, double lhs_norm_sq, double b_frob_sq, double gamma,
                        std::size_t k);

} // namespace fls
