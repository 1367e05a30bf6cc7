#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mebb/clustering.hpp"
#include "mebb/data.hpp"
#include "mebb/optimizer.hpp"
#include "mebb/stats.hpp"

namespace mebb {

/// Invalid command-line input or plan (exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output files disagree with each other (reported by `verify`).
class VerificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode { Bench, Cluster };
enum class Algorithm { BBBC, MEBBBC, KMEBB, KMeans };

std::string_view algorithm_name(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct ExperimentPlan {
    Mode mode = Mode::Bench;
    std::vector<Algorithm> algorithms{Algorithm::BBBC, Algorithm::MEBBBC};
    std::string function = "sphere"; ///< bench target
    std::size_t dimension = 50;
    std::filesystem::path dataset; ///< cluster target
    CsvSchema schema;
    std::size_t k = 0;
    std::size_t runs = 50;
    OptimizerConfig config; ///< config.seed is the base seed; run i uses base + i
    DistanceMetric metric = DistanceMetric::Euclidean;
    std::size_t refine_steps = 1;
    std::size_t jobs = 1;
    std::filesystem::path output_dir = "results";
    bool json = false;

    /// Throws UsageError when the plan cannot be run.
    void validate() const;
};

struct ResultRecord {
    std::string algorithm;
    std::string target;
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    double final_cost = 0.0;
    double wall_time_ms = 0.0;
};

struct SummaryRow {
    std::string algorithm;
    std::string target;
    RunSummary summary;
};

struct ExperimentOutcome {
    std::vector<ResultRecord> records; ///< ordered by (algorithm, run_index)
    std::vector<SummaryRow> summaries; ///< one per algorithm, plan order
};

/// Runs every (algorithm, run) pair of a benchmark plan and writes
/// results.csv, summary.csv, timings.csv, plan.json and one
/// trace_<alg>_<run>.csv per run into plan.output_dir.
ExperimentOutcome run_bench(const ExperimentPlan& plan);

/// Clustering counterpart of run_bench; also writes best_model.csv with the
/// centers and assignments of each algorithm's best run.
ExperimentOutcome run_cluster(const ExperimentPlan& plan);

struct CompareRow {
    std::string test; ///< "welch" or "friedman"
    std::string target;
    std::optional<TestResult> result;
    std::string note;
};

struct CompareOptions {
    std::filesystem::path results_a;
    std::filesystem::path results_b;
    std::optional<std::string> algorithm_a; ///< required when a file holds several algorithms
    std::optional<std::string> algorithm_b;
    std::filesystem::path output_dir = ".";
    bool json = false;
};

/// Welch t-test per shared target and a Friedman test across targets (blocks)
/// on mean final cost; writes significance.csv.
std::vector<CompareRow> run_compare(const CompareOptions& options);

/// Re-derives summary.csv from results.csv and checks every trace file.
/// Throws VerificationError on the first inconsistency.
void verify_outputs(const std::filesystem::path& output_dir);

/// Parses a results.csv produced by run_bench / run_cluster.
std::vector<ResultRecord> read_results(const std::filesystem::path& path);

}  // namespace mebb
