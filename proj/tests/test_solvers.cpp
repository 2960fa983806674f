#include "fls/factorization.hpp"
#include "fls/metrics.hpp"
#include "fls/problems.hpp"
#include "fls/solvers.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace fls;

namespace {

FactorizedProblem small_problem(std::uint64_t seed, bool consistent, std::size_t m = 40, std::size_t l = 10,
                                std::size_t n = 20, std::size_t s = 3) {
    Rng rng(seed);
    return gen_gaussian(GaussianSpec{m, l, n, s, consistent}, rng);
}

} // namespace

TEST(RkStep, Examples) {
    const DenseMatrix A = DenseMatrix::from_rows({{2}});
    Vector y{0};
    rk_update(A, Vector{6}, y, 0);
    EXPECT_EQ(y, (Vector{3}));

    Vector y2{0, 0};
    rk_update(DenseMatrix::identity(2), Vector{1, 2}, y2, 0);
    EXPECT_EQ(y2, (Vector{1, 0}));

    // fixed point
    const DenseMatrix M = DenseMatrix::from_rows({{1, 2}, {3, -1}});
    Vector y3{1, 1};
    const Vector b3 = matvec(M, y3);
    rk_update(M, b3, y3, 1);
    EXPECT_EQ(y3, (Vector{1, 1}));
}

TEST(RkStep, SatisfiesSampledRow) {
    Rng rng(31);
    const DenseMatrix A = oracle::gaussian(15, 6, rng);
    const Vector b = oracle::gaussian_vector(15, rng);
    const WeightedSampler rows(A.row_norms_sq());
    Vector y(6, 0.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t j = rk_step(A, b, y, rows, rng);
        EXPECT_NEAR(A.row_dot(j, y), b[j], 1e-12 * (1.0 + std::abs(b[j])));
    }
}

TEST(RgsStep, Examples) {
    const DenseMatrix A = DenseMatrix::from_rows({{1}, {0}});
    Vector y{0}, r{5, 7};
    const double d = rgs_update(A, y, r, 0);
    EXPECT_EQ(d, 5.0);
    EXPECT_EQ(y, (Vector{5}));
    EXPECT_EQ(r, (Vector{0, 7}));

    // stationary at the least-squares point
    Rng rng(32);
    const DenseMatrix M = oracle::gaussian(10, 3, rng);
    const Vector b = oracle::gaussian_vector(10, rng);
    Vector ys = least_squares_solve(M, b);
    Vector rs = subtract(b, matvec(M, ys));
    const Vector before = ys;
    rgs_update(M, ys, rs, 1);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(ys[i], before[i], 1e-12);
}

TEST(RgsStep, ResidualRecursionMatchesDirectResidual) {
    Rng rng(33);
    const DenseMatrix A = oracle::gaussian(10, 3, rng);
    const Vector b = oracle::gaussian_vector(10, rng);
    const WeightedSampler cols(A.col_norms_sq());
    Vector y(3, 0.0), r = b;
    for (int t = 0; t < 500; ++t) {
        const std::size_t j = rgs_step(A, y, r, cols, rng);
        EXPECT_LE(std::abs(A.col_dot(j, r)), 1e-10 * std::sqrt(A.col_norm_sq(j)) * norm2(r) + 1e-300);
    }
    const Vector direct = subtract(b, matvec(A, y));
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(r[i], direct[i], 1e-12);
}

TEST(RrkStep, Examples) {
    const Regularizer e = Regularizer::elastic_net(1.0);
    const DenseMatrix B = DenseMatrix::from_rows({{1}});
    Vector z{0}, x{0};
    rrk_update(B, Vector{5}, z, x, e, 0);
    EXPECT_EQ(z, (Vector{5}));
    EXPECT_EQ(x, (Vector{4}));

    // satisfied row leaves (z, x) unchanged
    Rng rng(34);
    const DenseMatrix M = oracle::gaussian(4, 7, rng);
    Vector z2 = oracle::gaussian_vector(7, rng);
    Vector x2 = e.grad_conjugate(z2);
    const Vector t = matvec(M, x2);
    const Vector z0 = z2, x0 = x2;
    rrk_update(M, t, z2, x2, e, 2);
    EXPECT_EQ(z2, z0);
    EXPECT_EQ(x2, x0);
}

TEST(RrkStep, QuadraticReducesToRk) {
    Rng rng(35);
    const DenseMatrix B = oracle::gaussian(12, 20, rng);
    const Vector t = oracle::gaussian_vector(12, rng);
    const WeightedSampler rows(B.row_norms_sq());
    Vector y(20, 0.0), z(20, 0.0), x(20, 0.0);
    Rng r1(99), r2(99);
    for (int k = 0; k < 2000; ++k) {
        const auto j = rk_step(B, t, y, rows, r1);
        const auto i = rrk_step(B, t, z, x, Regularizer::quadratic(), rows, r2);
        ASSERT_EQ(i, j);
    }
    EXPECT_LT(norm_inf(subtract(x, y)), 1e-15);
}

TEST(GerkStep, OrthogonalColumnsZeroComponent) {
    const DenseMatrix C = DenseMatrix::from_rows({{1, 0}, {0, 2}, {0, 0}});
    const Vector b{1, 2, 3};
    const FullSystem sys(C, b);
    SolverState s;
    s.y = b;
    s.z = Vector(2, 0.0);
    s.x = Vector(2, 0.0);
    gerk_update(sys, s, Regularizer::elastic_net(0.5), StepDraws{1, 0});
    EXPECT_EQ(C.col_dot(1, s.y), 0.0);
    EXPECT_EQ(s.y[0], 1.0);
    EXPECT_EQ(s.k, 1u);
}

TEST(RsegsStep, MatchedIteratesLeaveZUnchanged) {
    Rng rng(36);
    const DenseMatrix C = oracle::gaussian(8, 5, rng);
    const Vector b = oracle::gaussian_vector(8, rng);
    const FullSystem sys(C, b);
    SolverState s;
    s.y = Vector(5, 0.0);
    s.r = b;
    // choose z with x = grad f*(z) equal to y after the RGS substep on column 2
    Vector y_after = s.y, r_after = s.r;
    rgs_update(C, y_after, r_after, 2);
    s.z = y_after;  // quadratic: x = z
    s.x = s.z;
    const Vector z0 = s.z;
    rsegs_update(sys, s, Regularizer::quadratic(), StepDraws{2, 4});
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(s.z[i], z0[i], 1e-15);
}

TEST(Run, MaxitZeroLogsOnlyInitialPoint) {
    const FactorizedProblem p = small_problem(1, true);
    SolverConfig c;
    c.maxit = 0;
    const IterationHistory h = run(p, c);
    ASSERT_EQ(h.rows.size(), 1u);
    EXPECT_EQ(h.rows[0].k, 0u);
    EXPECT_DOUBLE_EQ(h.rows[0].rel_residual, 1.0);
    ASSERT_TRUE(h.rows[0].rel_error);
    EXPECT_DOUBLE_EQ(*h.rows[0].rel_error, 1.0);
}

TEST(Run, DeterministicInSeed) {
    const FactorizedProblem p = small_problem(2, false);
    for (const char* tag : {"rk", "rgs", "rsk", "rk-rsk", "rgs-rsk", "gerk", "rsegs"}) {
        const AlgorithmChoice ch = resolve_algorithm(tag, std::nullopt, 0.5);
        SolverConfig c;
        c.algorithm = ch.algorithm;
        c.regularizer = ch.regularizer;
        c.maxit = 500;
        c.log_every = 50;
        c.seed = 17;
        const IterationHistory h1 = run(p, c), h2 = run(p, c);
        ASSERT_EQ(h1.rows.size(), h2.rows.size()) << tag;
        for (std::size_t i = 0; i < h1.rows.size(); ++i) {
            EXPECT_EQ(h1.rows[i].k, h2.rows[i].k);
            EXPECT_EQ(h1.rows[i].rel_residual, h2.rows[i].rel_residual) << tag;
            EXPECT_EQ(h1.rows[i].rel_error, h2.rows[i].rel_error) << tag;
        }
        EXPECT_EQ(h1.final_x, h2.final_x) << tag;
    }
}

TEST(Run, HistoryShapeAndOptionalFields) {
    const FactorizedProblem p = small_problem(3, true);
    SolverConfig c;
    c.maxit = 105;
    c.log_every = 20;
    const IterationHistory h = run(p, c);
    std::vector<std::size_t> ks;
    for (const auto& r : h.rows) ks.push_back(r.k);
    EXPECT_EQ(ks, (std::vector<std::size_t>{0, 20, 40, 60, 80, 100, 105}));
    for (const auto& r : h.rows) {
        EXPECT_TRUE(r.rel_error.has_value());
        EXPECT_TRUE(r.bregman.has_value());
    }

    const FactorizedProblem nostar(p.A(), p.B(), p.b(), std::nullopt, true);
    const IterationHistory h2 = run(nostar, c);
    for (const auto& r : h2.rows) {
        EXPECT_FALSE(r.rel_error.has_value());
        EXPECT_FALSE(r.bregman.has_value());
    }
}

TEST(Run, EarlyStopOnTolerance) {
    const FactorizedProblem p = small_problem(4, true);
    SolverConfig c;
    c.maxit = 100000;
    c.log_every = 10;
    c.stop_tolerance = 1e-6;
    const IterationHistory h = run(p, c);
    EXPECT_LT(h.rows.back().rel_residual, 1e-6);
    EXPECT_LT(h.rows.back().k, 100000u);
}

TEST(Run, InvalidStridesThrow) {
    const FactorizedProblem p = small_problem(5, true);
    SolverConfig c;
    c.log_every = 0;
    EXPECT_THROW(run(p, c), std::invalid_argument);
}

TEST(Run, WarnsWhenInitialDualOutsideRowSpace) {
    const FactorizedProblem p = small_problem(6, true);
    SolverConfig c;
    c.maxit = 10;
    Vector z0(p.n(), 0.0);
    z0[0] = 1.0;  // generic vector: not in ran(B^T) since l < n
    c.initial_z = z0;
    EXPECT_FALSE(run(p, c).warnings.empty());
    c.initial_z = matvec_transposed(p.B(), Vector(p.l(), 1.0));
    EXPECT_TRUE(run(p, c).warnings.empty());
}

TEST(Run, ResidualRefreshKeepsCacheAccurate) {
    const FactorizedProblem p = small_problem(7, false);
    const FactorizedSystem sys(p.A(), p.B(), p.b());
    SolverState s = initial_state(Algorithm::RgsRrk, p, Regularizer::elastic_net(1.0));
    Rng rng(1);
    for (int k = 0; k < 20000; ++k) rgs_rrk_step(sys, s, Regularizer::elastic_net(1.0), rng);
    const Vector direct = subtract(p.b(), matvec(p.A(), s.y));
    EXPECT_LT(norm2(subtract(direct, s.r)), 1e-10 * norm2(p.b()));
}

TEST(RkRrk, QuadraticWithIdentityAConvergesToMinimumNorm) {
    Rng rng(37);
    const DenseMatrix B = oracle::gaussian(8, 20, rng);
    const Vector x_true = oracle::gaussian_vector(20, rng);
    const Vector bb = matvec(B, x_true);
    const FactorizedProblem p(DenseMatrix::identity(8), B, bb, std::nullopt, true);
    SolverConfig c;
    c.maxit = 20000;
    c.log_every = 20000;
    const IterationHistory h = run(p, c);
    const Vector xmn = min_norm_solve(B, bb);
    EXPECT_LT(rel_error(h.final_x, xmn), 1e-8);
}

TEST(RgsRrk, ConsistentInputMatchesRkRrkLimit) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const FactorizedProblem p = small_problem(100 + seed, true, 30, 6, 12, 2);
        SolverConfig c;
        c.maxit = 20000;
        c.log_every = 20000;
        c.seed = seed;
        c.regularizer = Regularizer::elastic_net(0.2);
        c.algorithm = Algorithm::RkRrk;
        const Vector x1 = run(p, c).final_x;
        c.algorithm = Algorithm::RgsRrk;
        const Vector x2 = run(p, c).final_x;
        EXPECT_LT(rel_error(x2, x1), 1e-6) << "seed " << seed;
    }
}

TEST(Gerk, ConsistentSystemDrivesYToZero) {
    const FactorizedProblem p = small_problem(8, true, 30, 10, 15, 2);
    SolverConfig c;
    c.algorithm = Algorithm::Gerk;
    c.regularizer = Regularizer::elastic_net(0.5);
    c.maxit = 40000;
    c.log_every = 40000;
    const IterationHistory h = run(p, c);
    EXPECT_LT(h.rows.back().rel_residual, 1e-8);
}

TEST(Rsegs, LambdaZeroConvergesToMinimumNormLeastSquares) {
    const FactorizedProblem p = small_problem(9, false, 40, 8, 12, 2);
    SolverConfig c;
    c.algorithm = Algorithm::Rsegs;
    c.regularizer = Regularizer::elastic_net(0.0);
    c.maxit = 60000;
    c.log_every = 60000;
    const IterationHistory h = run(p, c);
    const Vector xmn = min_norm_solve(p.B(), least_squares_solve(p.A(), p.b()));
    EXPECT_LT(rel_error(h.final_x, xmn), 1e-6);
}

TEST(Rsegs, RecoversSparseLeastSquaresSolution) {
    const FactorizedProblem p = small_problem(10, false, 200, 50, 100, 5);
    SolverConfig c;
    c.algorithm = Algorithm::Rsegs;
    c.regularizer = Regularizer::elastic_net(1.0);
    c.maxit = 200000;
    c.log_every = 200000;
    EXPECT_LT(*run(p, c).rows.back().rel_error, 1e-3);
}

TEST(ResolveAlgorithm, TagsAndConflicts) {
    EXPECT_EQ(resolve_algorithm("rk-rsk", std::nullopt, 1.0).regularizer.kind(), RegularizerKind::ElasticNetL1);
    EXPECT_EQ(resolve_algorithm("rk-rk", std::nullopt, 1.0).algorithm, Algorithm::RkRrk);
    EXPECT_EQ(resolve_algorithm("rgs-rk", std::nullopt, 1.0).algorithm, Algorithm::RgsRrk);
    EXPECT_EQ(resolve_algorithm("rrk", RegularizerKind::ElasticNetL1, 2.0).regularizer.lambda(), 2.0);
    EXPECT_THROW(resolve_algorithm("rk-rk", RegularizerKind::ElasticNetL1, 1.0), std::invalid_argument);
    EXPECT_THROW(resolve_algorithm("nope", std::nullopt, 1.0), std::invalid_argument);
}
