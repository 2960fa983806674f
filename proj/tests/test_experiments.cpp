#include "fls/experiments.hpp"
#include "fls/metrics.hpp"
#include "fls/problems.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

using namespace fls;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("fls_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

FactorizedProblem small_problem(bool consistent, std::uint64_t seed = 5) {
    Rng rng(seed);
    return gen_gaussian(GaussianSpec{40, 8, 20, 3, consistent}, rng);
}

SolverConfig config(Algorithm a, Regularizer f, std::size_t maxit, std::size_t log_every) {
    SolverConfig c;
    c.algorithm = a;
    c.regularizer = f;
    c.maxit = maxit;
    c.log_every = log_every;
    c.seed = 100;
    return c;
}

} // namespace

TEST(RunTrials, SingleTrialEqualsSingleRun) {
    const auto p = small_problem(true);
    const auto c = config(Algorithm::RkRrk, Regularizer::elastic_net(0.5), 300, 25);
    const AveragedHistory h = run_trials(p, c, 1);
    const IterationHistory r = run(p, c);
    ASSERT_EQ(h.rows.size(), r.rows.size());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        EXPECT_EQ(h.rows[i].k, r.rows[i].k);
        EXPECT_EQ(h.rows[i].rel_residual, r.rows[i].rel_residual);
        EXPECT_EQ(*h.rows[i].rel_error, *r.rows[i].rel_error);
    }
    EXPECT_EQ(h.final_x.front(), r.final_x);
    EXPECT_EQ(h.trial_count, 1u);
}

TEST(RunTrials, InitialRowIsTheStartingMetric) {
    const auto p = small_problem(true);
    const auto h = run_trials(p, config(Algorithm::RkRrk, Regularizer::elastic_net(1.0), 100, 10), 6);
    ASSERT_FALSE(h.rows.empty());
    EXPECT_EQ(h.rows.front().k, 0u);
    EXPECT_DOUBLE_EQ(h.rows.front().rel_residual, 1.0);
    EXPECT_DOUBLE_EQ(*h.rows.front().rel_error, 1.0);
    EXPECT_EQ(h.rows.back().k, 100u);
}

TEST(RunTrials, MeanOfIndependentRuns) {
    const auto p = small_problem(false);
    auto c = config(Algorithm::RgsRrk, Regularizer::elastic_net(1.0), 200, 50);
    const auto h = run_trials(p, c, 4);
    std::vector<double> finals;
    double mean = 0.0;
    for (std::uint64_t t = 0; t < 4; ++t) {
        c.seed = 100 + t;
        const auto r = run(p, c);
        mean += r.rows.back().rel_residual / 4.0;
        finals.push_back(*r.rows.back().rel_error);
    }
    EXPECT_NEAR(h.rows.back().rel_residual, mean, 1e-14);
    EXPECT_EQ(h.final_rel_error, finals);
    EXPECT_LE(h.rows.back().rel_residual_min, h.rows.back().rel_residual);
    EXPECT_GE(h.rows.back().rel_residual_max, h.rows.back().rel_residual);
}

TEST(RunTrials, ThreadCountDoesNotChangeResults) {
    const auto p = small_problem(true);
    const auto c = config(Algorithm::RkRrk, Regularizer::elastic_net(1.0), 400, 40);
    const auto h1 = run_trials(p, c, 8, 1);
    const auto h4 = run_trials(p, c, 8, 4);
    ASSERT_EQ(h1.rows.size(), h4.rows.size());
    for (std::size_t i = 0; i < h1.rows.size(); ++i) {
        EXPECT_EQ(h1.rows[i].rel_residual, h4.rows[i].rel_residual);
        EXPECT_EQ(*h1.rows[i].rel_error, *h4.rows[i].rel_error);
    }
    EXPECT_EQ(h1.final_x, h4.final_x);
}

TEST(RunTrials, FactoryVariantUsesSeedPerTrial) {
    std::vector<std::uint64_t> seen;
    std::mutex mu;
    const auto factory = [&](std::uint64_t s) {
        std::lock_guard<std::mutex> lock(mu);
        seen.push_back(s);
        return small_problem(true, s);
    };
    const auto h = run_trials(factory, config(Algorithm::RkRrk, Regularizer::quadratic(), 50, 10), 3, 2);
    std::sort(seen.begin(), seen.end());
    EXPECT_EQ(seen, (std::vector<std::uint64_t>{100, 101, 102}));
    EXPECT_EQ(h.trial_count, 3u);
}

TEST(AverageHistories, EarlyStopCarriesLastRow) {
    IterationHistory a, b;
    a.algorithm = b.algorithm = "x";
    a.rows = {{0, 1.0, 1.0}, {10, 0.5, 0.4}, {20, 0.25, 0.2}};
    b.rows = {{0, 1.0, 1.0}, {10, 0.1, 0.1}};
    a.final_x = b.final_x = Vector{0.0};
    const auto h = average_histories({a, b}, 7);
    ASSERT_EQ(h.rows.size(), 3u);
    EXPECT_DOUBLE_EQ(h.rows[2].rel_residual, (0.25 + 0.1) / 2);
    EXPECT_DOUBLE_EQ(*h.rows[2].rel_error, (0.2 + 0.1) / 2);
    EXPECT_EQ(h.final_k, (std::vector<std::size_t>{20, 10}));
}

TEST(Median, OddAndEven) {
    EXPECT_EQ(median({3, 1, 2}), 2.0);
    EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
    EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(HistoryCsv, RoundTripIsLossless) {
    const auto p = small_problem(true);
    auto c = config(Algorithm::RkRrk, Regularizer::elastic_net(1.0), 120, 30);
    c.tag = "rk-rsk";
    const auto h1 = run_trials(p, c, 3);
    c = config(Algorithm::Rk, Regularizer::quadratic(), 120, 30);
    c.tag = "rk";
    const auto h2 = run_trials(p, c, 3);
    const auto dir = temp_dir("history");
    write_history_csv(dir / "h.csv", {h1, h2});

    std::ifstream in(dir / "h.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, kHistoryHeader);

    const auto back = read_history_csv(dir / "h.csv");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].algorithm, "rk-rsk");
    EXPECT_EQ(back[1].algorithm, "rk");
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& orig = j ? h2 : h1;
        EXPECT_EQ(back[j].trial_count, 3u);
        ASSERT_EQ(back[j].rows.size(), orig.rows.size());
        for (std::size_t i = 0; i < orig.rows.size(); ++i) {
            EXPECT_EQ(back[j].rows[i].k, orig.rows[i].k);
            EXPECT_EQ(back[j].rows[i].rel_residual, orig.rows[i].rel_residual);
            EXPECT_EQ(back[j].rows[i].rel_error, orig.rows[i].rel_error);
            EXPECT_EQ(back[j].rows[i].bregman, orig.rows[i].bregman);
            EXPECT_EQ(back[j].rows[i].elapsed_s, orig.rows[i].elapsed_s);
        }
    }
}

TEST(HistoryCsv, RejectsNonIncreasingK) {
    const auto dir = temp_dir("history_bad");
    std::ofstream(dir / "h.csv") << kHistoryHeader << "\nrk,2,0,1,1,,0\nrk,2,0,0.5,0.5,,0\n";
    EXPECT_THROW(read_history_csv(dir / "h.csv"), std::exception);
}

TEST(TidyCsv, OneRowPerMetric) {
    const auto p = small_problem(true);
    auto c = config(Algorithm::RkRrk, Regularizer::elastic_net(1.0), 40, 20);
    c.tag = "rk-rsk";
    const auto h = run_trials(p, c, 2);
    const auto dir = temp_dir("tidy");
    write_tidy_csv(dir / "t.csv", {h});
    std::ifstream in(dir / "t.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "algorithm,k,metric,value");
    std::size_t count = 0, errors = 0;
    while (std::getline(in, line)) {
        ++count;
        errors += line.find(",rel_error,") != std::string::npos;
    }
    EXPECT_EQ(errors, h.rows.size());
    EXPECT_GE(count, 3 * h.rows.size());
}

TEST(FinalIterates, MatrixShape) {
    const auto p = small_problem(true);
    const auto h = run_trials(p, config(Algorithm::RkRrk, Regularizer::quadratic(), 20, 10), 3);
    const auto dir = temp_dir("finals");
    write_final_iterates_csv(dir / "x.csv", h);
    const DenseMatrix X = read_matrix_csv(dir / "x.csv");
    EXPECT_EQ(X.rows(), 20u);
    EXPECT_EQ(X.cols(), 3u);
    for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(X(i, t), h.final_x[t][i]);
}

TEST(Reproduce, ParsersAndPairs) {
    EXPECT_EQ(parse_example("example1-consistent"), Example::Example1Consistent);
    EXPECT_EQ(parse_example("example2-inconsistent"), Example::Example2Inconsistent);
    EXPECT_THROW(parse_example("e3"), std::invalid_argument);
    EXPECT_EQ(parse_scale("desk"), Scale::Desk);
    EXPECT_THROW(parse_scale("huge"), std::invalid_argument);
    EXPECT_EQ(example_algorithms(Example::Example1Consistent), (std::vector<std::string>{"rk-rk", "rk-rsk"}));
    EXPECT_EQ(example_algorithms(Example::Example1Inconsistent), (std::vector<std::string>{"rgs-rk", "rgs-rsk"}));
    EXPECT_EQ(example_algorithms(Example::Example2Consistent), (std::vector<std::string>{"rsk", "rk-rsk"}));
    EXPECT_EQ(example_algorithms(Example::Example2Inconsistent), (std::vector<std::string>{"gerk", "rgs-rsk"}));
}

TEST(Reproduce, SmallRunWritesOutputsAndSummary) {
    const auto dir = temp_dir("reproduce");
    ReproduceOptions o;
    o.example = Example::Example1Consistent;
    o.trials = 2;
    o.maxit = 200;
    o.log_every = 50;
    o.out = dir;
    const auto r = reproduce(o);
    ASSERT_EQ(r.histories.size(), 2u);
    EXPECT_EQ(r.histories[0].algorithm, "rk-rk");
    EXPECT_EQ(r.histories[1].algorithm, "rk-rsk");
    EXPECT_NE(r.summary.find("rk-rk"), std::string::npos);
    EXPECT_NE(r.summary.find("rk-rsk"), std::string::npos);
    EXPECT_EQ(r.summary.find("gerk"), std::string::npos);
    for (const char* f : {"history.csv", "tidy.csv", "summary.txt", "final_x_rk-rk.csv", "final_x_rk-rsk.csv"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
}

TEST(Reproduce, PaperScaleInconsistentRefusesBeforeWork) {
    ReproduceOptions o;
    o.example = Example::Example1Inconsistent;
    o.scale = Scale::Paper;
    try {
        reproduce(o);
        FAIL() << "expected an error";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("2000"), std::string::npos) << e.what();
    }
}

TEST(Reproduce, WineExampleNeedsCsv) {
    ReproduceOptions o;
    o.example = Example::Example2Consistent;
    EXPECT_THROW(reproduce(o), std::invalid_argument);
}
