#pragma once

#include "fls/dense.hpp"
#include "fls/problem.hpp"

namespace fls {

//! ||b - A (B x)|| / ||b||, two factor matvecs; throws on b = 0
double rel_residual_consistent(const FactorizedProblem& p, std::span<const double> x);

//! ||B^T A^T (b - A B x)|| / ||B^T A^T b||; throws when the denominator vanishes
double rel_residual_normal(const FactorizedProblem& p, std::span<const double> x);

//! the residual plotted for the problem: consistent -> plain, inconsistent -> normal equations
double rel_residual(const FactorizedProblem& p, std::span<const double> x);

//! ||x - x*|| / ||x*||; throws on x* = 0
double rel_error(std::span<const double> x, std::span<const double> x_star);

} // namespace fls
