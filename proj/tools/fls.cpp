// Command-line front end: gen, ingest-wine, solve, bounds, reproduce.

#include "fls/csv.hpp"
#include "fls/experiments.hpp"
#include "fls/factorization.hpp"
#include "fls/problems.hpp"
#include "fls/solvers.hpp"
#include "fls/theory.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace fls;

// "4000", "20m" or "10m" (multiples of the row count m)
std::size_t parse_maxit(const std::string& text, std::size_t m) {
    if (!text.empty() && text.back() == 'm') {
        const std::string factor = text.substr(0, text.size() - 1);
        std::size_t pos = 0;
        const unsigned long long f = factor.empty() ? 1 : std::stoull(factor, &pos);
        if (!factor.empty() && pos != factor.size()) throw std::invalid_argument("bad --maxit '" + text + "'");
        return static_cast<std::size_t>(f) * m;
    }
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("bad --maxit '" + text + "'");
    return static_cast<std::size_t>(v);
}

std::optional<RegularizerKind> parse_reg(const std::string& text) {
    if (text.empty()) return std::nullopt;
    if (text == "quadratic") return RegularizerKind::Quadratic;
    if (text == "l1") return RegularizerKind::ElasticNetL1;
    throw std::invalid_argument("unknown regularizer '" + text + "' (expected quadratic or l1)");
}

void print_warnings(const std::vector<std::string>& ws) {
    for (const auto& w : ws) std::cerr << "warning: " << w << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized iterative solvers for factorized linear systems A B x = b"};
    app.require_subcommand(1);

    // gen
    GaussianSpec spec;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Generate a Gaussian factorized problem with a sparse ground truth");
    gen->add_option("--m", spec.m, "rows of A")->capture_default_str();
    gen->add_option("--l", spec.l, "inner dimension")->capture_default_str();
    gen->add_option("--n", spec.n, "columns of B")->capture_default_str();
    gen->add_option("--s", spec.s, "nonzeros of x*")->capture_default_str();
    gen->add_option("--consistent", spec.consistent, "b in ran(AB) (true) or not (false)")->capture_default_str();
    gen->add_option("--seed", gen_seed)->capture_default_str();
    gen->add_option("--out", gen_out, "problem directory")->required();

    // ingest-wine
    std::string wine_csv, wine_out;
    std::size_t wine_rank = 5, wine_iters = 200;
    std::uint64_t wine_seed = 1;
    bool wine_consistent = true;
    std::optional<char> wine_delim;
    bool wine_keep_label = false;
    auto* ingest = app.add_subcommand("ingest-wine", "Wine-quality CSV -> NMF -> factorized problem");
    ingest->add_option("--csv", wine_csv)->required()->check(CLI::ExistingFile);
    ingest->add_option("--rank", wine_rank)->capture_default_str();
    ingest->add_option("--nmf-iters", wine_iters)->capture_default_str();
    ingest->add_option("--seed", wine_seed)->capture_default_str();
    ingest->add_option("--consistent", wine_consistent)->capture_default_str();
    ingest->add_option("--delimiter", wine_delim, "field separator (default: sniffed from the header line)");
    ingest->add_flag("--keep-label", wine_keep_label, "do not drop the quality column");
    ingest->add_option("--out", wine_out)->required();

    // solve
    std::string solve_problem, solve_alg, solve_reg, solve_maxit = "20m", solve_out;
    double solve_lambda = 1.0;
    std::size_t solve_trials = 1, solve_log_every = 20, solve_threads = 1;
    std::uint64_t solve_seed = 1;
    std::optional<double> solve_tol;
    auto* solve = app.add_subcommand("solve", "Run an algorithm on a problem directory");
    solve->add_option("--problem", solve_problem)->required()->check(CLI::ExistingDirectory);
    solve->add_option("--alg", solve_alg,
                      "rk, rgs, rrk, rsk, rk-rk, rk-rsk, rgs-rk, rgs-rsk, rk-rrk, rgs-rrk, gerk, rsegs "
                      "(default: rk-rsk for consistent problems, rgs-rsk otherwise)");
    solve->add_option("--reg", solve_reg, "quadratic or l1");
    solve->add_option("--lambda", solve_lambda)->capture_default_str();
    solve->add_option("--maxit", solve_maxit, "iterations, or 20m / 10m for multiples of m")->capture_default_str();
    solve->add_option("--trials", solve_trials)->capture_default_str();
    solve->add_option("--seed", solve_seed)->capture_default_str();
    solve->add_option("--log-every", solve_log_every)->capture_default_str();
    solve->add_option("--threads", solve_threads, "0 = all cores")->capture_default_str();
    solve->add_option("--tol", solve_tol, "stop when the logged relative residual drops below this");
    solve->add_option("--out", solve_out)->required();

    // bounds
    std::string bounds_problem, bounds_alg = "rk-rk", bounds_reg;
    std::optional<double> bounds_delta, bounds_nu;
    double bounds_lambda = 1.0;
    std::size_t bounds_kmax = 1000, bounds_step = 10;
    auto* bounds = app.add_subcommand("bounds", "Rate constants and the expectation bound table (CSV)");
    bounds->add_option("--problem", bounds_problem)->required()->check(CLI::ExistingDirectory);
    bounds->add_option("--alg", bounds_alg, "a factorized tag: rk-rk, rk-rsk, rgs-rk, rgs-rsk, ...")
        ->capture_default_str();
    bounds->add_option("--reg", bounds_reg, "quadratic or l1");
    bounds->add_option("--lambda", bounds_lambda)->capture_default_str();
    bounds->add_option("--delta", bounds_delta, "splitting parameter (default: midpoint of the admissible range)");
    bounds->add_option("--nu", bounds_nu, "nu for the l1 regularizer (not derivable in closed form)");
    bounds->add_option("--kmax", bounds_kmax)->capture_default_str();
    bounds->add_option("--step", bounds_step)->capture_default_str();

    // reproduce
    std::string rep_example, rep_scale = "desk", rep_out;
    ReproduceOptions rep;
    std::optional<std::size_t> rep_trials;
    auto* repro = app.add_subcommand("reproduce", "Rerun one of the four reference experiments");
    repro->add_option("example", rep_example,
                      "example1-consistent, example1-inconsistent, example2-consistent, example2-inconsistent")
        ->required();
    repro->add_option("--scale", rep_scale, "desk or paper")->capture_default_str();
    repro->add_option("--wine-csv", rep.wine_csv, "wine-quality CSV (Example 2)");
    repro->add_option("--trials", rep_trials);
    repro->add_option("--seed", rep.base_seed)->capture_default_str();
    repro->add_option("--threads", rep.threads, "0 = all cores")->capture_default_str();
    repro->add_option("--out", rep_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            Rng rng(gen_seed);
            const FactorizedProblem p = gen_gaussian(spec, rng);
            save_problem(p, gen_out);
            std::cout << p.describe() << '\n';
        } else if (*ingest) {
            DatasetCsvOptions opts = wine_csv_options(wine_csv);
            if (wine_delim) opts.delimiter = *wine_delim;
            if (wine_keep_label) opts.drop_columns.clear();
            const DenseMatrix X = load_csv_dataset(wine_csv, opts);
            Rng rng(wine_seed);
            const NmfResult f = nmf(X, wine_rank, wine_iters, rng);
            Rng rhs_rng(wine_seed + 1);
            Vector x_star = wine_target();
            if (x_star.size() != f.B.cols())
                throw DimensionError("wine target has length 11 but the table has " + std::to_string(f.B.cols()) +
                                     " columns");
            Vector b = make_rhs(f.A, f.B, x_star, wine_consistent, rhs_rng);
            const FactorizedProblem p(f.A, f.B, std::move(b), std::move(x_star), wine_consistent,
                                      ProblemMeta{3, wine_seed, "wine"});
            save_problem(p, wine_out);
            std::cout << p.describe() << "\nNMF error " << f.errors.front() << " -> " << f.errors.back() << '\n';
        } else if (*solve) {
            FactorizedProblem p = load_problem(solve_problem);
            const std::string tag = solve_alg.empty() ? (p.consistent() ? "rk-rsk" : "rgs-rsk") : solve_alg;
            const AlgorithmChoice choice = resolve_algorithm(tag, parse_reg(solve_reg), solve_lambda);
            if (!is_factorized(choice.algorithm)) p.ensure_full_matrix();
            SolverConfig c;
            c.algorithm = choice.algorithm;
            c.regularizer = choice.regularizer;
            c.tag = choice.tag;
            c.maxit = parse_maxit(solve_maxit, p.m());
            c.seed = solve_seed;
            c.log_every = solve_log_every;
            c.stop_tolerance = solve_tol;
            const AveragedHistory h = run_trials(p, c, solve_trials, solve_threads);
            std::filesystem::create_directories(solve_out);
            write_history_csv(std::filesystem::path(solve_out) / "history.csv", {h});
            write_tidy_csv(std::filesystem::path(solve_out) / "tidy.csv", {h});
            write_final_iterates_csv(std::filesystem::path(solve_out) / ("final_x_" + h.algorithm + ".csv"), h);
            print_warnings(h.warnings);
            std::cout << summary_table({h});
        } else if (*bounds) {
            const FactorizedProblem p = load_problem(bounds_problem);
            const AlgorithmChoice choice = resolve_algorithm(bounds_alg, parse_reg(bounds_reg), bounds_lambda);
            if (!is_factorized(choice.algorithm))
                throw std::invalid_argument("bounds: '" + bounds_alg + "' is not a factorized algorithm");
            const Regularizer& f = choice.regularizer;
            std::optional<double> nu = bounds_nu;
            if (!nu && f.kind() == RegularizerKind::Quadratic) nu = nu_quadratic(p.B());

            std::cout << "alpha," << format_double(alpha_of(p.A())) << '\n';
            if (!nu) {
                std::cout << "nu,\n";
                std::cerr << "nu is not derivable for the l1 regularizer; pass --nu to get beta, rho and the bound\n";
                return 0;
            }
            const RateConstants c = rate_constants(p.A(), p.B(), f.gamma(), *nu, bounds_delta);
            print_warnings(c.warnings);
            std::cout << "beta," << format_double(c.beta) << '\n'
                      << "rho," << format_double(c.rho) << '\n'
                      << "nu," << format_double(c.nu) << '\n'
                      << "delta," << format_double(c.delta) << '\n';

            // x* of the bound: min-norm (least-squares) solution for quadratic f, the stored x* otherwise
            Vector x_star;
            if (f.kind() == RegularizerKind::Quadratic)
                x_star = min_norm_solve(p.B(), least_squares_solve(p.A(), p.b()));
            else if (p.x_star())
                x_star = *p.x_star();
            else
                throw std::invalid_argument("bounds: the l1 bound needs xstar.csv in the problem directory");
            const double d0 = bregman_distance(f, Vector(p.n(), 0.0), x_star);
            const bool gs = choice.algorithm == Algorithm::RgsRrk;
            const double lhs = gs ? norm_factor_inconsistent(p.A(), p.b()) : norm_factor_consistent(p.A(), p.b());
            const auto series = theorem_bound_series(c, d0, lhs, p.B().frobenius_sq(), f.gamma(), bounds_kmax);
            std::cout << "k,bound\n";
            for (std::size_t k = 0; k <= bounds_kmax; k += std::max<std::size_t>(bounds_step, 1))
                std::cout << k << ',' << format_double(series[k]) << '\n';
        } else if (*repro) {
            rep.example = parse_example(rep_example);
            rep.scale = parse_scale(rep_scale);
            rep.trials = rep_trials;
            rep.out = rep_out;
            const ReproduceResult r = reproduce(rep);
            std::cout << r.summary;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
