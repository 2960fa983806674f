#include "fls/experiments.hpp"

#include "fls/csv.hpp"
#include "fls/problems.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fls {

namespace {

std::size_t resolve_threads(std::size_t threads, std::size_t trials) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    return std::min(threads, trials);
}

// runs job(t) for t = 0..trials-1; the first failing trial (by index) is rethrown
void for_each_trial(std::size_t trials, std::size_t threads, const std::function<void(std::size_t)>& job) {
    std::vector<std::exception_ptr> errors(trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < trials; t = next++) {
            try {
                job(t);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        }
    };
    const std::size_t n = resolve_threads(threads, trials);
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t t = 0; t < trials; ++t) {
        if (!errors[t]) continue;
        try {
            std::rethrow_exception(errors[t]);
        } catch (const std::exception& e) {
            throw std::runtime_error("trial " + std::to_string(t) + ": " + e.what());
        }
    }
}

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

} // namespace

AveragedHistory average_histories(const std::vector<IterationHistory>& runs, std::uint64_t base_seed) {
    if (runs.empty()) throw std::invalid_argument("average_histories: need at least one run");
    AveragedHistory out;
    out.algorithm = runs.front().algorithm;
    out.trial_count = runs.size();
    out.base_seed = base_seed;

    std::set<std::size_t> ks;
    for (const auto& r : runs) {
        if (r.rows.empty()) throw std::invalid_argument("average_histories: empty history");
        for (const auto& row : r.rows) ks.insert(row.k);
        for (const auto& w : r.warnings)
            if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end())
                out.warnings.push_back(w);
    }

    const double T = static_cast<double>(runs.size());
    std::vector<std::size_t> cursor(runs.size(), 0);
    for (const std::size_t k : ks) {
        AveragedRow avg;
        avg.k = k;
        bool have_err = true, have_breg = true;
        double res = 0.0, err = 0.0, breg = 0.0, el = 0.0;
        avg.rel_residual_min = std::numeric_limits<double>::infinity();
        avg.rel_residual_max = -std::numeric_limits<double>::infinity();
        double err_min = std::numeric_limits<double>::infinity();
        double err_max = -std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < runs.size(); ++t) {
            const auto& rows = runs[t].rows;
            while (cursor[t] + 1 < rows.size() && rows[cursor[t] + 1].k <= k) ++cursor[t];
            const HistoryRow& row = rows[cursor[t]];
            res += row.rel_residual;
            avg.rel_residual_min = std::min(avg.rel_residual_min, row.rel_residual);
            avg.rel_residual_max = std::max(avg.rel_residual_max, row.rel_residual);
            el += row.elapsed_s;
            if (row.rel_error) {
                err += *row.rel_error;
                err_min = std::min(err_min, *row.rel_error);
                err_max = std::max(err_max, *row.rel_error);
            } else {
                have_err = false;
            }
            if (row.bregman)
                breg += *row.bregman;
            else
                have_breg = false;
        }
        avg.rel_residual = res / T;
        avg.elapsed_s = el / T;
        if (have_err) {
            avg.rel_error = err / T;
            avg.rel_error_min = err_min;
            avg.rel_error_max = err_max;
        }
        if (have_breg) avg.bregman = breg / T;
        out.rows.push_back(avg);
    }

    for (const auto& r : runs) {
        out.final_x.push_back(r.final_x);
        out.final_rel_residual.push_back(r.rows.back().rel_residual);
        if (r.rows.back().rel_error) out.final_rel_error.push_back(*r.rows.back().rel_error);
        out.final_k.push_back(r.rows.back().k);
    }
    if (out.final_rel_error.size() != runs.size()) out.final_rel_error.clear();
    return out;
}

AveragedHistory run_trials(const FactorizedProblem& problem, const SolverConfig& config, std::size_t trials,
                           std::size_t threads) {
    if (trials < 1) throw std::invalid_argument("run_trials: need at least one trial");
    std::vector<IterationHistory> runs(trials);
    for_each_trial(trials, threads, [&](std::size_t t) {
        SolverConfig c = config;
        c.seed = config.seed + t;
        runs[t] = run(problem, c);
    });
    return average_histories(runs, config.seed);
}

AveragedHistory run_trials(const std::function<FactorizedProblem(std::uint64_t)>& make_problem,
                           const SolverConfig& config, std::size_t trials, std::size_t threads) {
    if (trials < 1) throw std::invalid_argument("run_trials: need at least one trial");
    std::vector<IterationHistory> runs(trials);
    for_each_trial(trials, threads, [&](std::size_t t) {
        SolverConfig c = config;
        c.seed = config.seed + t;
        const FactorizedProblem p = make_problem(c.seed);
        runs[t] = run(p, c);
    });
    return average_histories(runs, config.seed);
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t h = values.size() / 2;
    return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

void write_history_csv(std::ostream& out, const AveragedHistory& h, bool header) {
    if (header) out << kHistoryHeader << '\n';
    for (const auto& row : h.rows) {
        out << h.algorithm << ',' << h.trial_count << ',' << row.k << ',' << format_double(row.rel_residual) << ','
            << optional_field(row.rel_error) << ',' << optional_field(row.bregman) << ','
            << format_double(row.elapsed_s) << '\n';
    }
}

void write_history_csv(const std::filesystem::path& path, const std::vector<AveragedHistory>& hs) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path.string());
    out << kHistoryHeader << '\n';
    for (const auto& h : hs) write_history_csv(out, h, false);
}

std::vector<AveragedHistory> read_history_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kHistoryHeader)
        throw CsvError(path.string() + ": expected header '" + kHistoryHeader + "'");

    std::vector<AveragedHistory> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 7)
            throw CsvError(path.string() + ":" + std::to_string(line_no) + ": expected 7 fields, got " +
                           std::to_string(f.size()));
        auto it = std::find_if(out.begin(), out.end(), [&](const AveragedHistory& h) { return h.algorithm == f[0]; });
        if (it == out.end()) {
            out.emplace_back();
            it = std::prev(out.end());
            it->algorithm = f[0];
            it->trial_count = std::stoull(f[1]);
        }
        AveragedRow row;
        row.k = std::stoull(f[2]);
        row.rel_residual = parse_double(f[3]);
        if (!f[4].empty()) row.rel_error = parse_double(f[4]);
        if (!f[5].empty()) row.bregman = parse_double(f[5]);
        row.elapsed_s = parse_double(f[6]);
        row.rel_residual_min = row.rel_residual_max = row.rel_residual;
        row.rel_error_min = row.rel_error_max = row.rel_error;
        if (!it->rows.empty() && row.k <= it->rows.back().k)
            throw CsvError(path.string() + ":" + std::to_string(line_no) + ": k is not increasing");
        it->rows.push_back(row);
    }
    return out;
}

void write_tidy_csv(const std::filesystem::path& path, const std::vector<AveragedHistory>& hs) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path.string());
    out << "algorithm,k,metric,value\n";
    for (const auto& h : hs)
        for (const auto& row : h.rows) {
            out << h.algorithm << ',' << row.k << ",rel_residual," << format_double(row.rel_residual) << '\n';
            if (row.rel_error)
                out << h.algorithm << ',' << row.k << ",rel_error," << format_double(*row.rel_error) << '\n';
            if (row.bregman) out << h.algorithm << ',' << row.k << ",bregman," << format_double(*row.bregman) << '\n';
            out << h.algorithm << ',' << row.k << ",elapsed_s," << format_double(row.elapsed_s) << '\n';
        }
}

void write_final_iterates_csv(const std::filesystem::path& path, const AveragedHistory& h) {
    if (h.final_x.empty()) throw std::invalid_argument("write_final_iterates_csv: no iterates");
    const std::size_t n = h.final_x.front().size();
    std::vector<double> data;
    data.reserve(n * h.final_x.size());
    for (const auto& x : h.final_x) data.insert(data.end(), x.begin(), x.end());
    write_matrix_csv(path, DenseMatrix(n, h.final_x.size(), std::move(data)));
}

std::string summary_table(const std::vector<AveragedHistory>& hs) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-10s %6s %8s %14s %14s %16s %14s\n", "algorithm", "trials", "final_k",
                  "mean_rel_res", "mean_rel_err", "median_rel_err", "s_per_iter");
    os << buf;
    for (const auto& h : hs) {
        const AveragedRow& last = h.rows.back();
        const double per_iter = last.k > 0 ? last.elapsed_s / static_cast<double>(last.k) : 0.0;
        char mean_err[32] = "-", med_err[32] = "-";
        if (last.rel_error) std::snprintf(mean_err, sizeof mean_err, "%.6e", *last.rel_error);
        if (!h.final_rel_error.empty()) std::snprintf(med_err, sizeof med_err, "%.6e", median(h.final_rel_error));
        std::snprintf(buf, sizeof buf, "%-10s %6zu %8zu %14.6e %14s %16s %14.6e\n", h.algorithm.c_str(),
                      h.trial_count, last.k, last.rel_residual, mean_err, med_err, per_iter);
        os << buf;
    }
    return os.str();
}

////////////////////////////////////////////////
//
// reproduce
//

Example parse_example(const std::string& name) {
    if (name == "example1-consistent") return Example::Example1Consistent;
    if (name == "example1-inconsistent") return Example::Example1Inconsistent;
    if (name == "example2-consistent") return Example::Example2Consistent;
    if (name == "example2-inconsistent") return Example::Example2Inconsistent;
    throw std::invalid_argument("unknown example '" + name +
                                "' (expected example1-consistent, example1-inconsistent, example2-consistent or "
                                "example2-inconsistent)");
}

std::string example_name(Example e) {
    switch (e) {
    case Example::Example1Consistent: return "example1-consistent";
    case Example::Example1Inconsistent: return "example1-inconsistent";
    case Example::Example2Consistent: return "example2-consistent";
    case Example::Example2Inconsistent: return "example2-inconsistent";
    }
    return {};
}

Scale parse_scale(const std::string& name) {
    if (name == "desk") return Scale::Desk;
    if (name == "paper") return Scale::Paper;
    throw std::invalid_argument("unknown scale '" + name + "' (expected desk or paper)");
}

std::vector<std::string> example_algorithms(Example e) {
    switch (e) {
    case Example::Example1Consistent: return {"rk-rk", "rk-rsk"};
    case Example::Example1Inconsistent: return {"rgs-rk", "rgs-rsk"};
    case Example::Example2Consistent: return {"rsk", "rk-rsk"};
    case Example::Example2Inconsistent: return {"gerk", "rgs-rsk"};
    }
    return {};
}

ReproduceResult reproduce(const ReproduceOptions& o) {
    const bool ex1 = o.example == Example::Example1Consistent || o.example == Example::Example1Inconsistent;
    const bool consistent = o.example == Example::Example1Consistent || o.example == Example::Example2Consistent;
    const bool paper = o.scale == Scale::Paper;
    const std::size_t trials = o.trials.value_or(paper ? 50 : 20);

    ReproduceResult result;
    std::vector<SolverConfig> configs;
    for (const auto& tag : example_algorithms(o.example)) {
        const AlgorithmChoice choice = resolve_algorithm(tag, std::nullopt, o.lambda);
        SolverConfig c;
        c.algorithm = choice.algorithm;
        c.regularizer = choice.regularizer;
        c.tag = choice.tag;
        c.seed = o.base_seed;
        c.log_every = o.log_every;
        configs.push_back(c);
    }

    if (ex1) {
        GaussianSpec spec = paper ? GaussianSpec{10000, 2500, 5000, 20, consistent} : GaussianSpec{200, 50, 100, 5, consistent};
        spec.consistent = consistent;
        if (!consistent && spec.m > kInconsistentRowCeiling)
            throw std::invalid_argument("inconsistent generation at m = " + std::to_string(spec.m) +
                                        " exceeds the QR ceiling of " + std::to_string(kInconsistentRowCeiling) +
                                        "; use --scale desk");
        const std::size_t maxit = o.maxit.value_or(20 * spec.m);
        auto make = [spec](std::uint64_t seed) {
            Rng rng(seed);
            return gen_gaussian(spec, rng);
        };
        for (auto& c : configs) {
            c.maxit = maxit;
            result.histories.push_back(run_trials(make, c, trials, o.threads));
        }
    } else {
        if (!o.wine_csv) throw std::invalid_argument("example 2 needs a wine CSV (--wine-csv <path>)");
        const DenseMatrix X = load_wine_csv(*o.wine_csv);
        Rng rng(o.base_seed);
        FactorizedProblem p = wine_problem(X, 5, 200, consistent, rng);
        const auto t0 = std::chrono::steady_clock::now();
        p.ensure_full_matrix();
        result.full_matrix_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const std::size_t maxit = o.maxit.value_or(10 * p.m());
        for (auto& c : configs) {
            c.maxit = maxit;
            result.histories.push_back(run_trials(p, c, trials, o.threads));
        }
    }

    std::ostringstream summary;
    summary << example_name(o.example) << " (" << (paper ? "paper" : "desk") << " scale, " << trials
            << " trials, base seed " << o.base_seed << ")\n"
            << summary_table(result.histories);
    if (!ex1) summary << "forming C = A B took " << format_double(result.full_matrix_seconds) << " s\n";
    for (const auto& h : result.histories)
        for (const auto& w : h.warnings) summary << "warning (" << h.algorithm << "): " << w << '\n';
    result.summary = summary.str();

    if (!o.out.empty()) {
        std::filesystem::create_directories(o.out);
        write_history_csv(o.out / "history.csv", result.histories);
        write_tidy_csv(o.out / "tidy.csv", result.histories);
        for (const auto& h : result.histories) write_final_iterates_csv(o.out / ("final_x_" + h.algorithm + ".csv"), h);
        std::ofstream(o.out / "summary.txt") << result.summary;
    }
    return result;
}

} // namespace fls
