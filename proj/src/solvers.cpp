#include "fls/solvers.hpp"

#include "fls/factorization.hpp"
#include "fls/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fls {

std::string_view algorithm_name(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::Rk: return "rk";
    case Algorithm::Rgs: return "rgs";
    case Algorithm::Rrk: return "rrk";
    case Algorithm::RkRrk: return "rk-rrk";
    case Algorithm::RgsRrk: return "rgs-rrk";
    case Algorithm::Gerk: return "gerk";
    case Algorithm::Rsegs: return "rsegs";
    }
    return "?";
}

bool is_factorized(Algorithm a) noexcept { return a == Algorithm::RkRrk || a == Algorithm::RgsRrk; }

bool uses_residual(Algorithm a) noexcept {
    return a == Algorithm::Rgs || a == Algorithm::RgsRrk || a == Algorithm::Rsegs;
}

AlgorithmChoice resolve_algorithm(std::string_view tag, std::optional<RegularizerKind> reg, double lambda) {
    auto fixed = [&](Algorithm a, RegularizerKind kind) {
        if (reg && *reg != kind)
            throw std::invalid_argument("algorithm '" + std::string(tag) + "' implies the " +
                                        (kind == RegularizerKind::Quadratic ? "quadratic" : "l1") +
                                        " regularizer");
        return AlgorithmChoice{std::string(tag), a,
                               kind == RegularizerKind::Quadratic ? Regularizer::quadratic()
                                                                  : Regularizer::elastic_net(lambda)};
    };
    auto chosen = [&](Algorithm a, RegularizerKind fallback) {
        const RegularizerKind kind = reg.value_or(fallback);
        return AlgorithmChoice{std::string(tag), a,
                               kind == RegularizerKind::Quadratic ? Regularizer::quadratic()
                                                                  : Regularizer::elastic_net(lambda)};
    };

    if (tag == "rk") return fixed(Algorithm::Rk, RegularizerKind::Quadratic);
    if (tag == "rgs") return fixed(Algorithm::Rgs, RegularizerKind::Quadratic);
    if (tag == "rk-rk") return fixed(Algorithm::RkRrk, RegularizerKind::Quadratic);
    if (tag == "rgs-rk") return fixed(Algorithm::RgsRrk, RegularizerKind::Quadratic);
    if (tag == "rk-rsk") return fixed(Algorithm::RkRrk, RegularizerKind::ElasticNetL1);
    if (tag == "rgs-rsk") return fixed(Algorithm::RgsRrk, RegularizerKind::ElasticNetL1);
    if (tag == "rsk") return fixed(Algorithm::Rrk, RegularizerKind::ElasticNetL1);
    if (tag == "rrk") return chosen(Algorithm::Rrk, RegularizerKind::Quadratic);
    if (tag == "rk-rrk") return chosen(Algorithm::RkRrk, RegularizerKind::Quadratic);
    if (tag == "rgs-rrk") return chosen(Algorithm::RgsRrk, RegularizerKind::Quadratic);
    if (tag == "gerk") return chosen(Algorithm::Gerk, RegularizerKind::ElasticNetL1);
    if (tag == "rsegs") return chosen(Algorithm::Rsegs, RegularizerKind::ElasticNetL1);
    throw std::invalid_argument("unknown algorithm tag '" + std::string(tag) + "'");
}

FactorizedSystem::FactorizedSystem(const DenseMatrix& A, const DenseMatrix& B, std::span<const double> b)
    : A_(&A), B_(&B), b_(b.begin(), b.end()), a_rows_(A.row_norms_sq()), a_cols_(A.col_norms_sq()),
      b_rows_(B.row_norms_sq()) {
    require_same_size(A.cols(), B.rows(), "FactorizedSystem: A columns vs B rows");
    require_same_size(b.size(), A.rows(), "FactorizedSystem: b length");
}

FullSystem::FullSystem(const DenseMatrix& C, std::span<const double> b)
    : C_(&C), b_(b.begin(), b.end()), rows_(C.row_norms_sq()), cols_(C.col_norms_sq()) {
    require_same_size(b.size(), C.rows(), "FullSystem: b length");
}

void rk_update(const DenseMatrix& A, std::span<const double> b, std::span<double> y, std::size_t row) {
    const double coeff = (A.row_dot(row, y) - b[row]) / A.row_norm_sq(row);
    A.row_axpy(row, -coeff, y);
}

std::size_t rk_step(const DenseMatrix& A, std::span<const double> b, std::span<double> y,
                    const WeightedSampler& rows, Rng& rng) {
    const std::size_t j = rows.sample(rng);
    rk_update(A, b, y, j);
    return j;
}

double rgs_update(const DenseMatrix& A, std::span<double> y, std::span<double> r, std::size_t col) {
    const double d = A.col_dot(col, r) / A.col_norm_sq(col);
    y[col] += d;
    A.col_axpy(col, -d, r);
    return d;
}

std::size_t rgs_step(const DenseMatrix& A, std::span<double> y, std::span<double> r, const WeightedSampler& cols,
                     Rng& rng) {
    const std::size_t j = cols.sample(rng);
    rgs_update(A, y, r, j);
    return j;
}

void rrk_update(const DenseMatrix& B, std::span<const double> target, std::span<double> z, std::span<double> x,
                const Regularizer& f, std::size_t row) {
    const double coeff = f.gamma() * (B.row_dot(row, x) - target[row]) / B.row_norm_sq(row);
    B.row_axpy(row, -coeff, z);
    f.grad_conjugate_into(z, x);
}

std::size_t rrk_step(const DenseMatrix& B, std::span<const double> target, std::span<double> z,
                     std::span<double> x, const Regularizer& f, const WeightedSampler& rows, Rng& rng) {
    const std::size_t i = rows.sample(rng);
    rrk_update(B, target, z, x, f, i);
    return i;
}

void rk_rrk_update(const FactorizedSystem& sys, SolverState& s, const Regularizer& f, StepDraws d) {
    rk_update(sys.A(), sys.b(), s.y, d.first);
    rrk_update(sys.B(), s.y, s.z, s.x, f, d.second);
    ++s.k;
}

StepDraws rk_rrk_step(const FactorizedSystem& sys, SolverState& s, const Regularizer& f, Rng& rng) {
    const std::size_t j = sys.a_rows().sample(rng);
    const std::size_t i = sys.b_rows().sample(rng);
    const StepDraws d{j, i};
    rk_rrk_update(sys, s, f, d);
    return d;
}

void rgs_rrk_update(const FactorizedSystem& sys, SolverState& s, const Regularizer& f, StepDraws d) {
    rgs_update(sys.A(), s.y, s.r, d.first);
    rrk_update(sys.B(), s.y, s.z, s.x, f, d.second);
    ++s.k;
}

StepDraws rgs_rrk_step(const FactorizedSystem& sys, SolverState& s, const Regularizer& f, Rng& rng) {
    const std::size_t j = sys.a_cols().sample(rng);
    const std::size_t i = sys.b_rows().sample(rng);
    const StepDraws d{j, i};
    rgs_rrk_update(sys, s, f, d);
    return d;
}

void gerk_update(const FullSystem& sys, SolverState& s, const Regularizer& f, StepDraws d) {
    const DenseMatrix& C = sys.C();
    const double ycoeff = C.col_dot(d.first, s.y) / C.col_norm_sq(d.first);
    C.col_axpy(d.first, -ycoeff, s.y);

    const std::size_t i = d.second;
    const double zcoeff = (C.row_dot(i, s.x) - sys.b()[i] + s.y[i]) / C.row_norm_sq(i);
    C.row_axpy(i, -zcoeff, s.z);
    f.grad_conjugate_into(s.z, s.x);
    ++s.k;
}

StepDraws gerk_step(const FullSystem& sys, SolverState& s, const Regularizer& f, Rng& rng) {
    const std::size_t j = sys.cols().sample(rng);
    const std::size_t i = sys.rows().sample(rng);
    const StepDraws d{j, i};
    gerk_update(sys, s, f, d);
    return d;
}

void rsegs_update(const FullSystem& sys, SolverState& s, const Regularizer& f, StepDraws d) {
    const DenseMatrix& C = sys.C();
    rgs_update(C, s.y, s.r, d.first);

    const std::size_t i = d.second;
    const double zcoeff = (C.row_dot(i, s.x) - C.row_dot(i, s.y)) / C.row_norm_sq(i);
    C.row_axpy(i, -zcoeff, s.z);
    f.grad_conjugate_into(s.z, s.x);
    ++s.k;
}

StepDraws rsegs_step(const FullSystem& sys, SolverState& s, const Regularizer& f, Rng& rng) {
    const std::size_t j = sys.cols().sample(rng);
    const std::size_t i = sys.rows().sample(rng);
    const StepDraws d{j, i};
    rsegs_update(sys, s, f, d);
    return d;
}

SolverState initial_state(Algorithm algorithm, const FactorizedProblem& problem, const Regularizer& f,
                          const std::optional<Vector>& z0) {
    const std::size_t n = problem.n();
    SolverState s;
    switch (algorithm) {
    case Algorithm::Rk:
        s.y.assign(n, 0.0);
        break;
    case Algorithm::Rgs:
    case Algorithm::Rsegs:
        s.y.assign(n, 0.0);
        s.r = problem.b();
        break;
    case Algorithm::Rrk:
        break;
    case Algorithm::RkRrk:
        s.y.assign(problem.l(), 0.0);
        break;
    case Algorithm::RgsRrk:
        s.y.assign(problem.l(), 0.0);
        s.r = problem.b();
        break;
    case Algorithm::Gerk:
        s.y = problem.b();
        break;
    }
    if (algorithm == Algorithm::Rk || algorithm == Algorithm::Rgs) {
        // plain least-norm iterations: the iterate is y itself, x mirrors it
        s.x = s.y;
        s.z = s.y;
        return s;
    }
    if (z0) {
        require_same_size(z0->size(), n, "initial z");
        s.z = *z0;
    } else {
        s.z.assign(n, 0.0);
    }
    s.x = f.grad_conjugate(s.z);
    return s;
}

namespace {

using Clock = std::chrono::steady_clock;

// a view of the iterate the metrics are computed on
std::span<const double> primal(Algorithm a, const SolverState& s) {
    return (a == Algorithm::Rk || a == Algorithm::Rgs) ? std::span<const double>(s.y)
                                                       : std::span<const double>(s.x);
}

std::span<const double> dual(Algorithm a, const SolverState& s) {
    return (a == Algorithm::Rk || a == Algorithm::Rgs) ? std::span<const double>(s.y)
                                                       : std::span<const double>(s.z);
}

} // namespace

IterationHistory run(const FactorizedProblem& problem, const SolverConfig& config) {
    if (config.log_every < 1) throw std::invalid_argument("run: log_every must be >= 1");
    if (config.residual_refresh_every < 1) throw std::invalid_argument("run: residual_refresh_every must be >= 1");

    const Algorithm alg = config.algorithm;
    const Regularizer reg = (alg == Algorithm::Rk || alg == Algorithm::Rgs) ? Regularizer::quadratic()
                                                                             : config.regularizer;

    IterationHistory h;
    h.algorithm = config.tag.empty() ? std::string(algorithm_name(alg)) : config.tag;
    h.seed = config.seed;
    h.problem = problem.describe();

    std::optional<DenseMatrix> local_c;
    const DenseMatrix* C = nullptr;
    if (!is_factorized(alg)) {
        if (problem.full_matrix()) {
            C = &*problem.full_matrix();
        } else {
            local_c = multiply(problem.A(), problem.B());
            C = &*local_c;
        }
    }
    std::optional<FactorizedSystem> fsys;
    std::optional<FullSystem> csys;
    if (is_factorized(alg))
        fsys.emplace(problem.A(), problem.B(), problem.b());
    else
        csys.emplace(*C, problem.b());

    SolverState s = initial_state(alg, problem, reg, config.initial_z);

    std::optional<RowSpaceProjector> projector;
    if (config.track_dual_range || config.initial_z) projector.emplace(problem.B());
    if (config.initial_z) {
        const double off = norm2(projector->null_component(*config.initial_z));
        if (off > 1e-8 * std::max(1.0, norm2(*config.initial_z)))
            h.warnings.push_back("initial z is not in ran(B^T) (null-space component " + std::to_string(off) +
                                 "); convergence guarantees do not apply");
    }

    double elapsed = 0.0;
    auto log_point = [&] {
        const auto t0 = Clock::now();
        HistoryRow row;
        row.k = s.k;
        row.elapsed_s = elapsed;
        const auto x = primal(alg, s);
        row.rel_residual = rel_residual(problem, x);
        if (problem.x_star()) {
            row.rel_error = rel_error(x, *problem.x_star());
            row.bregman = bregman_distance(reg, dual(alg, s), *problem.x_star());
        }
        if (config.track_dual_range) row.dual_null_component = norm2(projector->null_component(dual(alg, s)));
        h.rows.push_back(row);
        h.metric_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
        return row.rel_residual;
    };

    log_point();
    Rng rng(config.seed);
    std::size_t since_refresh = 0;
    auto segment_start = Clock::now();
    try {
        while (s.k < config.maxit) {
            switch (alg) {
            case Algorithm::Rk:
                rk_step(*C, problem.b(), s.y, csys->rows(), rng);
                ++s.k;
                break;
            case Algorithm::Rgs:
                rgs_step(*C, s.y, s.r, csys->cols(), rng);
                ++s.k;
                break;
            case Algorithm::Rrk:
                rrk_step(*C, problem.b(), s.z, s.x, reg, csys->rows(), rng);
                ++s.k;
                break;
            case Algorithm::RkRrk: rk_rrk_step(*fsys, s, reg, rng); break;
            case Algorithm::RgsRrk: rgs_rrk_step(*fsys, s, reg, rng); break;
            case Algorithm::Gerk: gerk_step(*csys, s, reg, rng); break;
            case Algorithm::Rsegs: rsegs_step(*csys, s, reg, rng); break;
            }

            if (uses_residual(alg) && ++since_refresh == config.residual_refresh_every) {
                const DenseMatrix& M = alg == Algorithm::RgsRrk ? problem.A() : *C;
                s.r = subtract(problem.b(), matvec(M, s.y));
                since_refresh = 0;
            }

            if (s.k % config.log_every == 0 || s.k == config.maxit) {
                const auto now = Clock::now();
                elapsed += std::chrono::duration<double>(now - segment_start).count();
                const double res = log_point();
                if (config.stop_tolerance && res < *config.stop_tolerance) break;
                segment_start = Clock::now();
            }
        }
    } catch (const SolverError&) {
        throw;
    } catch (const std::exception& e) {
        throw SolverError(s.k + 1, e.what());
    }

    const auto x = primal(alg, s);
    h.final_x.assign(x.begin(), x.end());
    return h;
}

} // namespace fls
