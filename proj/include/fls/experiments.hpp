#pragma once

#include "fls/problem.hpp"
#include "fls/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fls {

struct AveragedRow {
    std::size_t k = 0;
    double rel_residual = 0.0;
    std::optional<double> rel_error;
    std::optional<double> bregman;
    double elapsed_s = 0.0;
    // spread over trials (not serialized to the history CSV)
    double rel_residual_min = 0.0;
    double rel_residual_max = 0.0;
    std::optional<double> rel_error_min;
    std::optional<double> rel_error_max;
};

//! Per-k arithmetic means over trial_count runs with seeds base_seed + t.
struct AveragedHistory {
    std::string algorithm;
    std::size_t trial_count = 0;
    std::uint64_t base_seed = 0;
    std::vector<AveragedRow> rows;
    std::vector<Vector> final_x;              // one per trial, in trial order
    std::vector<double> final_rel_residual;   // one per trial
    std::vector<double> final_rel_error;      // one per trial, empty without x*
    std::vector<std::size_t> final_k;         // iterations actually taken per trial
    std::vector<std::string> warnings;
};

//! Runs on the same problem with seeds config.seed + 0 .. config.seed + T - 1.
//! threads = 0 picks the hardware concurrency. Results do not depend on the schedule.
AveragedHistory run_trials(const FactorizedProblem& problem, const SolverConfig& config, std::size_t trials,
                           std::size_t threads = 1);

//! Variant where trial t also gets its own problem, make_problem(config.seed + t).
AveragedHistory run_trials(const std::function<FactorizedProblem(std::uint64_t)>& make_problem,
                           const SolverConfig& config, std::size_t trials, std::size_t threads = 1);

//! Aggregates finished runs; a run that stopped early contributes its last row to later k.
AveragedHistory average_histories(const std::vector<IterationHistory>& runs, std::uint64_t base_seed);

double median(std::vector<double> values);

////////////////////////////////////////////////
//
// serialization
//

inline constexpr const char* kHistoryHeader = "algorithm,trial_count,k,rel_residual,rel_error,bregman,elapsed_s";

void write_history_csv(std::ostream& out, const AveragedHistory& h, bool header = true);
void write_history_csv(const std::filesystem::path& path, const std::vector<AveragedHistory>& hs);
//! Groups rows by algorithm, in order of first appearance.
std::vector<AveragedHistory> read_history_csv(const std::filesystem::path& path);

//! Long format: algorithm,k,metric,value with metric in {rel_residual, rel_error, bregman, elapsed_s}.
void write_tidy_csv(const std::filesystem::path& path, const std::vector<AveragedHistory>& hs);

//! n rows, one column per trial
void write_final_iterates_csv(const std::filesystem::path& path, const AveragedHistory& h);

//! One line per history: algorithm, trials, final k, mean/median final errors, seconds per iteration.
std::string summary_table(const std::vector<AveragedHistory>& hs);

////////////////////////////////////////////////
//
// figure reproduction
//

enum class Example { Example1Consistent, Example1Inconsistent, Example2Consistent, Example2Inconsistent };
enum class Scale { Desk, Paper };

Example parse_example(const std::string& name);
std::string example_name(Example e);
Scale parse_scale(const std::string& name);

struct ReproduceOptions {
    Example example = Example::Example1Consistent;
    Scale scale = Scale::Desk;
    std::optional<std::filesystem::path> wine_csv;  // required for Example 2
    std::filesystem::path out;                      // empty: nothing written
    std::uint64_t base_seed = 1;
    std::optional<std::size_t> trials;              // default 20 (desk) or 50 (paper)
    std::optional<std::size_t> maxit;               // default 20m (Example 1) or 10m (Example 2)
    std::size_t log_every = 20;
    double lambda = 1.0;
    std::size_t threads = 1;
};

struct ReproduceResult {
    std::vector<AveragedHistory> histories;  // in the order of the matched pair
    std::string summary;
    //! Example 2: seconds spent forming C = A B for the full-system baseline
    double full_matrix_seconds = 0.0;
};

//! The matched algorithm tags for an example, baseline first.
std::vector<std::string> example_algorithms(Example e);

//!
//! Example 1 draws a fresh Gaussian problem per trial (seed base + t);
//! Example 2 builds one wine problem (NMF seeded with base) and varies the solver seed.
//! Writes history.csv, tidy.csv, final_x_<tag>.csv and summary.txt when out is set.
//!
ReproduceResult reproduce(const ReproduceOptions& options);

} // namespace fls
