// mebb: seeded experiment runner for BB-BC / ME-BB-BC benchmarks and clustering.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mebb/experiment.hpp"
#include "mebb/numfmt.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitIo = 4;

struct CommonFlags {
    std::string algorithms;
    std::size_t runs = 50;
    std::size_t iters = 100;
    std::size_t stars = 200;
    std::size_t memory = 10;
    double alpha0 = 0.1;
    double alpha_growth = 0.01;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::string out = "results";
    bool json = false;
    double tol = 0.0;
    std::string crunch = "center";
};

void add_common(CLI::App& cmd, CommonFlags& f, const std::string& default_algorithms) {
    f.algorithms = default_algorithms;
    cmd.add_option("--algorithms", f.algorithms, "Comma-separated list of algorithms")->capture_default_str();
    cmd.add_option("--runs", f.runs, "Independent runs per algorithm")->capture_default_str();
    cmd.add_option("--iters", f.iters, "Iterations per run")->capture_default_str();
    cmd.add_option("--stars", f.stars, "Population size")->capture_default_str();
    cmd.add_option("--memory", f.memory, "Solution memory capacity")->capture_default_str();
    cmd.add_option("--alpha0", f.alpha0, "Initial memory selection rate")->capture_default_str();
    cmd.add_option("--alpha-growth", f.alpha_growth, "Relative alpha increase per iteration")->capture_default_str();
    cmd.add_option("--seed", f.seed, "Base seed; run i uses seed + i")->capture_default_str();
    cmd.add_option("--jobs", f.jobs, "Worker threads")->capture_default_str();
    cmd.add_option("--out", f.out, "Output directory")->capture_default_str();
    cmd.add_flag("--json", f.json, "Also write JSON mirrors of the tables");
    cmd.add_option("--tol", f.tol, "Stop when best-so-far improves less than this over 10 iterations (0 = off)")
        ->capture_default_str();
    cmd.add_option("--crunch", f.crunch, "Contraction rule: center (weighted center of mass) or best (best star)")
        ->check(CLI::IsMember({"center", "best"}))
        ->capture_default_str();
}

std::vector<mebb::Algorithm> parse_algorithm_list(const std::string& text) {
    std::vector<mebb::Algorithm> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        const std::string name = text.substr(start, comma - start);
        const auto alg = mebb::parse_algorithm(name);
        if (!alg) throw mebb::UsageError("unknown algorithm '" + name + "'");
        out.push_back(*alg);
        start = comma + 1;
    }
    return out;
}

void apply_common(const CommonFlags& f, mebb::ExperimentPlan& plan) {
    plan.algorithms = parse_algorithm_list(f.algorithms);
    plan.runs = f.runs;
    plan.jobs = f.jobs;
    plan.output_dir = f.out;
    plan.json = f.json;
    plan.config.max_iters = f.iters;
    plan.config.num_stars = f.stars;
    plan.config.memory_capacity = f.memory;
    plan.config.alpha0 = f.alpha0;
    plan.config.alpha_growth = f.alpha_growth;
    plan.config.seed = f.seed;
    plan.config.stall_tolerance = f.tol;
    plan.config.crunch = f.crunch == "best" ? mebb::CrunchRule::BestStar : mebb::CrunchRule::WeightedCenter;
}

void print_summaries(const mebb::ExperimentOutcome& outcome) {
    std::cout << "algorithm,target,best,average,std,n_runs\n";
    for (const auto& row : outcome.summaries) {
        std::cout << row.algorithm << ',' << row.target << ',' << mebb::format_double(row.summary.best) << ','
                  << mebb::format_double(row.summary.average) << ',' << mebb::format_double(row.summary.std) << ','
                  << row.summary.n_runs << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Big Bang-Big Crunch optimizer and clustering experiment runner"};
    app.require_subcommand(1);

    CommonFlags bench_flags;
    std::string function = "sphere";
    std::size_t dim = 50;
    auto* bench = app.add_subcommand("bench", "Run seeded batches on a benchmark function");
    bench->add_option("--function", function, "rastrigin, step, sphere, rosenbrock, zakharov, levy, dixonprice")
        ->capture_default_str();
    bench->add_option("--dim", dim, "Problem dimension")->capture_default_str();
    add_common(*bench, bench_flags, "bbbc,mebbbc");

    CommonFlags cluster_flags;
    std::string dataset;
    std::size_t k = 0;
    std::string metric = "euclid";
    std::size_t refine_steps = 1;
    std::string label_column;
    char delimiter = ',';
    bool header = false;
    std::vector<std::size_t> skip_columns;
    auto* cluster = app.add_subcommand("cluster", "Run seeded clustering batches on a CSV dataset");
    cluster->add_option("--dataset", dataset, "CSV file of numeric features")->required();
    cluster->add_option("--k", k, "Number of clusters")->required();
    cluster->add_option("--metric", metric, "sq or euclid")->capture_default_str();
    cluster->add_option("--refine-steps", refine_steps, "Lloyd steps per star for kmebb")->capture_default_str();
    cluster->add_option("--label-column", label_column, "Label column (zero-based index or header name); excluded from features");
    cluster->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
    cluster->add_flag("--header", header, "First row is a header");
    cluster->add_option("--skip-columns", skip_columns, "Zero-based columns to ignore")->delimiter(',');
    add_common(*cluster, cluster_flags, "bbbc,mebbbc,kmebb,kmeans");

    std::string results_a;
    std::string results_b;
    std::string alg_a;
    std::string alg_b;
    std::string compare_out = ".";
    bool compare_json = false;
    auto* compare = app.add_subcommand("compare", "Welch and Friedman tests between two results.csv files");
    compare->add_option("results_a", results_a, "First results.csv")->required();
    compare->add_option("results_b", results_b, "Second results.csv")->required();
    compare->add_option("--alg-a", alg_a, "Algorithm to take from the first file");
    compare->add_option("--alg-b", alg_b, "Algorithm to take from the second file");
    compare->add_option("--out", compare_out, "Output directory for significance.csv")->capture_default_str();
    compare->add_flag("--json", compare_json, "Also write significance.json");

    std::string verify_dir;
    auto* verify = app.add_subcommand("verify", "Check that an output directory is internally consistent");
    verify->add_option("dir", verify_dir, "Output directory of bench or cluster")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*bench) {
            mebb::ExperimentPlan plan;
            plan.mode = mebb::Mode::Bench;
            plan.function = function;
            plan.dimension = dim;
            apply_common(bench_flags, plan);
            print_summaries(mebb::run_bench(plan));
        } else if (*cluster) {
            mebb::ExperimentPlan plan;
            plan.mode = mebb::Mode::Cluster;
            plan.dataset = dataset;
            plan.k = k;
            const auto m = mebb::parse_metric(metric);
            if (!m) throw mebb::UsageError("unknown metric '" + metric + "'");
            plan.metric = *m;
            plan.refine_steps = refine_steps;
            plan.schema.delimiter = delimiter;
            plan.schema.has_header = header;
            plan.schema.skip_columns.insert(skip_columns.begin(), skip_columns.end());
            if (!label_column.empty()) {
                if (label_column.find_first_not_of("0123456789") == std::string::npos) {
                    plan.schema.label_column = static_cast<std::size_t>(std::stoull(label_column));
                } else {
                    plan.schema.label_column = label_column;
                }
            }
            apply_common(cluster_flags, plan);
            print_summaries(mebb::run_cluster(plan));
        } else if (*compare) {
            mebb::CompareOptions options;
            options.results_a = results_a;
            options.results_b = results_b;
            if (!alg_a.empty()) options.algorithm_a = alg_a;
            if (!alg_b.empty()) options.algorithm_b = alg_b;
            options.output_dir = compare_out;
            options.json = compare_json;
            const auto rows = mebb::run_compare(options);
            std::cout << "test,target,statistic,df,p_value,note\n";
            for (const auto& row : rows) {
                std::cout << row.test << ',' << row.target << ',';
                if (row.result) {
                    std::cout << mebb::format_double(row.result->statistic) << ','
                              << mebb::format_double(row.result->df) << ','
                              << mebb::format_double(row.result->p_value);
                } else {
                    std::cout << ",,";
                }
                std::cout << ',' << row.note << '\n';
            }
        } else if (*verify) {
            mebb::verify_outputs(verify_dir);
            std::cout << "ok: " << verify_dir << " is consistent\n";
        }
    } catch (const mebb::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const mebb::VerificationError& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        return kExitData;
    } catch (const mebb::ParseError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const mebb::FormatError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::domain_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
