#pragma once

#include "fls/dense.hpp"
#include "fls/problem.hpp"
#include "fls/regularizer.hpp"
#include "fls/sampling.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fls {

////////////////////////////////////////////////
//
// algorithm identifiers
//

enum class Algorithm {
    Rk,      // Kaczmarz on the full system C x = b
    Rgs,     // Gauss-Seidel on the full system
    Rrk,     // regularized Kaczmarz on the full system (RSK for the l1 regularizer)
    RkRrk,   // factorized: Kaczmarz on A y = b + regularized Kaczmarz on B x = y
    RgsRrk,  // factorized: Gauss-Seidel on min ||b - A y|| + regularized Kaczmarz on B x = y
    Gerk,    // generalized extended Kaczmarz GERK-(a,d) on the full system
    Rsegs,   // randomized sparse extended Gauss-Seidel on the full system
};

std::string_view algorithm_name(Algorithm a) noexcept;
//! true for the algorithms that work on A and B directly
bool is_factorized(Algorithm a) noexcept;
//! true for the algorithms that carry the residual cache r
bool uses_residual(Algorithm a) noexcept;

//! An algorithm together with the regularizer implied by its CLI tag.
struct AlgorithmChoice {
    std::string tag;
    Algorithm algorithm;
    Regularizer regularizer;
};

//!
//! Resolves a CLI tag (rk, rgs, rrk, rk-rk, rk-rsk, rgs-rk, rgs-rsk, gerk,
//! rsegs, plus the generic rk-rrk / rgs-rrk). `reg` is the explicitly requested
//! regularizer kind, if any; a request contradicting the tag is an error.
//!
AlgorithmChoice resolve_algorithm(std::string_view tag, std::optional<RegularizerKind> reg, double lambda);

////////////////////////////////////////////////
//
// state and system views
//

//! Live iterates of one trial. Sizes depend on the algorithm (see initial_state).
struct SolverState {
    Vector y;  // auxiliary iterate
    Vector r;  // residual cache b - A y (Gauss-Seidel family only)
    Vector z;  // dual iterate
    Vector x;  // primal iterate, always grad f*(z)
    std::size_t k = 0;
};

//! Index draws of one combined step, in consumption order.
struct StepDraws {
    std::size_t first;   // row (RK) or column (RGS, GERK) of the first subsystem
    std::size_t second;  // row of B (or C) for the regularized step
};

//! Non-owning view of (A, B, b) with the three samplers the factorized
//! algorithms draw from. A and B must outlive the view.
class FactorizedSystem {
public:
    FactorizedSystem(const DenseMatrix& A, const DenseMatrix& B, std::span<const double> b);

    const DenseMatrix& A() const noexcept { return *A_; }
    const DenseMatrix& B() const noexcept { return *B_; }
    std::span<const double> b() const noexcept { return b_; }
    const WeightedSampler& a_rows() const noexcept { return a_rows_; }
    const WeightedSampler& a_cols() const noexcept { return a_cols_; }
    const WeightedSampler& b_rows() const noexcept { return b_rows_; }

private:
    const DenseMatrix* A_;
    const DenseMatrix* B_;
    Vector b_;
    WeightedSampler a_rows_;
    WeightedSampler a_cols_;
    WeightedSampler b_rows_;
};

//! Non-owning view of a full system C x = b. C must outlive the view.
class FullSystem {
public:
    FullSystem(const DenseMatrix& C, std::span<const double> b);

    const DenseMatrix& C() const noexcept { return *C_; }
    std::span<const double> b() const noexcept { return b_; }
    const WeightedSampler& rows() const noexcept { return rows_; }
    const WeightedSampler& cols() const noexcept { return cols_; }

private:
    const DenseMatrix* C_;
    Vector b_;
    WeightedSampler rows_;
    WeightedSampler cols_;
};

////////////////////////////////////////////////
//
// single-subsystem kernels; `*_update` takes an explicit 0-based index,
// `*_step` draws it from the sampler and returns it
//

//! y <- y - ((A_j y - b_j) / ||A_j||^2) A_j^T
void rk_update(const DenseMatrix& A, std::span<const double> b, std::span<double> y, std::size_t row);
std::size_t rk_step(const DenseMatrix& A, std::span<const double> b, std::span<double> y,
                    const WeightedSampler& rows, Rng& rng);

//! d = A_j^T r / ||A_j||^2; y_j += d; r -= d A_j. Returns d.
double rgs_update(const DenseMatrix& A, std::span<double> y, std::span<double> r, std::size_t col);
std::size_t rgs_step(const DenseMatrix& A, std::span<double> y, std::span<double> r,
                     const WeightedSampler& cols, Rng& rng);

//! z <- z - gamma ((B_i x - t_i) / ||B_i||^2) B_i^T; x <- grad f*(z)
void rrk_update(const DenseMatrix& B, std::span<const double> target, std::span<double> z, std::span<double> x,
                const Regularizer& f, std::size_t row);
std::size_t rrk_step(const DenseMatrix& B, std::span<const double> target, std::span<double> z,
                     std::span<double> x, const Regularizer& f, const WeightedSampler& rows, Rng& rng);

////////////////////////////////////////////////
//
// combined steps; each advances state.k by one
//

//! RK on (A, b), then one regularized step on (B, y); draws (row of A, row of B)
void rk_rrk_update(const FactorizedSystem& sys, SolverState& s, const Regularizer& f, StepDraws d);
StepDraws rk_rrk_step(const FactorizedSystem& sys, SolverState& s, const Regularizer& f, Rng& rng);

//! RGS on (A, b) keeping r = b - A y, then one regularized step on (B, y); draws (column of A, row of B)
void rgs_rrk_update(const FactorizedSystem& sys, SolverState& s, const Regularizer& f, StepDraws d);
StepDraws rgs_rrk_step(const FactorizedSystem& sys, SolverState& s, const Regularizer& f, Rng& rng);

//! GERK-(a,d): y <- y - (C_j^T y / ||C_j||^2) C_j; z <- z - ((C_i x - b_i + y_i) / ||C_i||^2) C_i^T;
//! x <- grad f*(z). Draws (column of C, row of C).
void gerk_update(const FullSystem& sys, SolverState& s, const Regularizer& f, StepDraws d);
StepDraws gerk_step(const FullSystem& sys, SolverState& s, const Regularizer& f, Rng& rng);

//! RSEGS: RGS on (C, b) for y, then z <- z - (C_i (x - y) / ||C_i||^2) C_i^T; x <- grad f*(z).
//! Draws (column of C, row of C).
void rsegs_update(const FullSystem& sys, SolverState& s, const Regularizer& f, StepDraws d);
StepDraws rsegs_step(const FullSystem& sys, SolverState& s, const Regularizer& f, Rng& rng);

////////////////////////////////////////////////
//
// driver
//

class SolverError : public std::runtime_error {
public:
    SolverError(std::size_t iteration, const std::string& what)
        : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

struct SolverConfig {
    Algorithm algorithm = Algorithm::RkRrk;
    Regularizer regularizer = Regularizer::quadratic();
    std::string tag;                           // label written to histories; defaults to algorithm_name
    std::size_t maxit = 1000;
    std::uint64_t seed = 0;
    std::size_t log_every = 1;
    std::size_t residual_refresh_every = 10000;
    std::optional<double> stop_tolerance;      // off by default: fixed budgets
    std::optional<Vector> initial_z;           // defaults to 0
    bool track_dual_range = false;             // log ||proj_null(B) z|| at every logged point
};

struct HistoryRow {
    std::size_t k = 0;
    double rel_residual = 0.0;
    std::optional<double> rel_error;
    std::optional<double> bregman;
    double elapsed_s = 0.0;                    // algorithm time only, metrics excluded
    std::optional<double> dual_null_component; // when track_dual_range is set
};

struct IterationHistory {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::string problem;
    std::vector<HistoryRow> rows;
    Vector final_x;
    std::vector<std::string> warnings;
    double metric_seconds = 0.0;
};

//! Initial iterates for `algorithm` on a system with the given shapes:
//! y = 0 (y = b for GERK), r = b, z = z0 (default 0), x = grad f*(z).
SolverState initial_state(Algorithm algorithm, const FactorizedProblem& problem, const Regularizer& f,
                          const std::optional<Vector>& z0 = std::nullopt);

//!
//! Runs config.maxit steps (fewer if stop_tolerance triggers), logging at
//! k = 0, every log_every steps and at the last step. Deterministic in the seed.
//! Full-system algorithms use problem.full_matrix() or materialize C locally.
//!
IterationHistory run(const FactorizedProblem& problem, const SolverConfig& config);

} // namespace fls
