#include "mebb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mebb/numfmt.hpp"

namespace mebb {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr Algorithm kAlgorithms[] = {Algorithm::BBBC, Algorithm::MEBBBC, Algorithm::KMEBB, Algorithm::KMeans};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write '" + path.string() + "'");
    out << content;
    out.close();
    if (!out) throw std::ios_base::failure("write failed for '" + path.string() + "'");
}

void prepare_output_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::ios_base::failure("cannot create output directory '" + dir.string() + "'");
    }
}

// Runs body(i) for i in [0, n) on `jobs` threads. The first exception thrown
// by any task is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t n, std::size_t jobs, Body&& body) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(jobs, n); ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

struct RunOutput {
    double final_cost = 0.0;
    double wall_time_ms = 0.0;
    std::optional<RunTrace> trace;
    std::optional<ClusterModel> model;
};

template <class Fn>
RunOutput timed(Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    RunOutput out = fn();
    out.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::string trace_csv(const RunTrace& trace) {
    std::string out = "iteration,best_so_far,center_of_mass_cost\n";
    for (std::size_t i = 0; i < trace.iterations(); ++i) {
        out += std::to_string(i + 1) + ',' + format_double(trace.best_cost_per_iter[i]) + ',' +
               format_double(trace.center_cost_per_iter[i]) + '\n';
    }
    return out;
}

std::string results_csv(const std::vector<ResultRecord>& records) {
    std::string out = "algorithm,target,run_index,seed,final_cost\n";
    for (const auto& r : records) {
        out += r.algorithm + ',' + r.target + ',' + std::to_string(r.run_index) + ',' + std::to_string(r.seed) +
               ',' + format_double(r.final_cost) + '\n';
    }
    return out;
}

std::string timings_csv(const std::vector<ResultRecord>& records) {
    std::string out = "algorithm,run_index,wall_time_ms\n";
    for (const auto& r : records) {
        out += r.algorithm + ',' + std::to_string(r.run_index) + ',' + format_double(r.wall_time_ms) + '\n';
    }
    return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out = "algorithm,target,best,average,std,n_runs\n";
    for (const auto& row : rows) {
        out += row.algorithm + ',' + row.target + ',' + format_double(row.summary.best) + ',' +
               format_double(row.summary.average) + ',' + format_double(row.summary.std) + ',' +
               std::to_string(row.summary.n_runs) + '\n';
    }
    return out;
}

json plan_json(const ExperimentPlan& plan, const std::string& target) {
    json algs = json::array();
    for (Algorithm a : plan.algorithms) algs.push_back(std::string(algorithm_name(a)));
    const auto& c = plan.config;
    json j = {
        {"mode", plan.mode == Mode::Bench ? "bench" : "cluster"},
        {"target", target},
        {"algorithms", algs},
        {"runs", plan.runs},
        {"base_seed", c.seed},
        {"max_iters", c.max_iters},
        {"num_stars", c.num_stars},
        {"memory_capacity", c.memory_capacity},
        {"alpha0", c.alpha0},
        {"alpha_growth", c.alpha_growth},
        {"alpha_cap", c.alpha_cap},
        {"first_iteration", c.first_iteration},
        {"crunch", c.crunch == CrunchRule::BestStar ? "best" : "center"},
        {"stall_tolerance", c.stall_tolerance},
        {"stall_window", c.stall_window},
    };
    if (plan.mode == Mode::Bench) {
        j["dimension"] = plan.dimension;
    } else {
        j["dataset"] = plan.dataset.string();
        j["k"] = plan.k;
        j["metric"] = std::string(metric_name(plan.metric));
        j["refine_steps"] = plan.refine_steps;
    }
    return j;
}

json records_json(const std::vector<ResultRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) {
        arr.push_back({{"algorithm", r.algorithm},
                       {"target", r.target},
                       {"run_index", r.run_index},
                       {"seed", r.seed},
                       {"final_cost", r.final_cost}});
    }
    return arr;
}

json summaries_json(const std::vector<SummaryRow>& rows) {
    json arr = json::array();
    for (const auto& row : rows) {
        arr.push_back({{"algorithm", row.algorithm},
                       {"target", row.target},
                       {"best", row.summary.best},
                       {"average", row.summary.average},
                       {"std", row.summary.std},
                       {"n_runs", row.summary.n_runs}});
    }
    return arr;
}

std::string best_model_csv(const std::vector<std::pair<std::string, std::pair<std::size_t, ClusterModel>>>& best) {
    std::size_t d = 0;
    for (const auto& [alg, entry] : best) d = std::max(d, entry.second.centers.cols());
    std::string out = "algorithm,run_index,kind,index";
    for (std::size_t j = 0; j < d; ++j) out += ",v" + std::to_string(j);
    out += '\n';
    for (const auto& [alg, entry] : best) {
        const auto& [run, model] = entry;
        const std::string prefix = alg + ',' + std::to_string(run) + ',';
        for (std::size_t c = 0; c < model.centers.rows(); ++c) {
            out += prefix + "center," + std::to_string(c);
            for (double v : model.centers.row(c)) out += ',' + format_double(v);
            out += '\n';
        }
        for (std::size_t n = 0; n < model.assignments.size(); ++n) {
            out += prefix + "assignment," + std::to_string(n) + ',' + std::to_string(model.assignments[n]);
            out += std::string(d > 0 ? d - 1 : 0, ',');
            out += '\n';
        }
    }
    return out;
}

// Runs all (algorithm, run) tasks of a plan and writes the shared outputs.
template <class RunOne>
ExperimentOutcome execute(const ExperimentPlan& plan, const std::string& target, RunOne&& run_one,
                          bool write_models) {
    prepare_output_dir(plan.output_dir);
    const std::size_t tasks = plan.algorithms.size() * plan.runs;
    std::vector<RunOutput> outputs(tasks);
    parallel_for(tasks, plan.jobs, [&](std::size_t t) {
        const Algorithm alg = plan.algorithms[t / plan.runs];
        const std::size_t run = t % plan.runs;
        outputs[t] = timed([&] { return run_one(alg, plan.config.seed + run); });
    });

    ExperimentOutcome outcome;
    std::vector<std::pair<std::string, std::pair<std::size_t, ClusterModel>>> best_models;
    for (std::size_t a = 0; a < plan.algorithms.size(); ++a) {
        const std::string alg(algorithm_name(plan.algorithms[a]));
        std::vector<double> costs;
        std::optional<std::size_t> best_run;
        for (std::size_t run = 0; run < plan.runs; ++run) {
            const RunOutput& out = outputs[a * plan.runs + run];
            outcome.records.push_back({alg, target, run, plan.config.seed + run, out.final_cost, out.wall_time_ms});
            costs.push_back(out.final_cost);
            if (!best_run || out.final_cost < outputs[a * plan.runs + *best_run].final_cost) best_run = run;
            if (out.trace) {
                write_file(plan.output_dir / ("trace_" + alg + "_" + std::to_string(run) + ".csv"),
                           trace_csv(*out.trace));
            }
        }
        outcome.summaries.push_back({alg, target, summarize(costs)});
        if (write_models) {
            const RunOutput& best = outputs[a * plan.runs + *best_run];
            best_models.push_back({alg, {*best_run, *best.model}});
        }
    }

    write_file(plan.output_dir / "results.csv", results_csv(outcome.records));
    write_file(plan.output_dir / "summary.csv", summary_csv(outcome.summaries));
    write_file(plan.output_dir / "timings.csv", timings_csv(outcome.records));
    write_file(plan.output_dir / "plan.json", plan_json(plan, target).dump(2) + '\n');
    if (write_models) write_file(plan.output_dir / "best_model.csv", best_model_csv(best_models));
    if (plan.json) {
        write_file(plan.output_dir / "results.json", records_json(outcome.records).dump(2) + '\n');
        write_file(plan.output_dir / "summary.json", summaries_json(outcome.summaries).dump(2) + '\n');
    }
    return outcome;
}

std::size_t column_of(const std::vector<std::string>& header, const std::string& name, const fs::path& path) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FormatError("'" + path.string() + "' has no '" + name + "' column");
    return static_cast<std::size_t>(it - header.begin());
}

double parse_number(const std::string& text, const fs::path& path, std::size_t row, std::size_t col) {
    const auto v = parse_double(text);
    if (!v) throw ParseError(row, col, "'" + path.string() + "' row " + std::to_string(row) + ": bad number '" + text + "'");
    return *v;
}

}  // namespace

std::string_view algorithm_name(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::BBBC: return "bbbc";
        case Algorithm::MEBBBC: return "mebbbc";
        case Algorithm::KMEBB: return "kmebb";
        case Algorithm::KMeans: return "kmeans";
    }
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (Algorithm a : kAlgorithms) {
        if (algorithm_name(a) == name) return a;
    }
    return std::nullopt;
}

void ExperimentPlan::validate() const {
    if (runs < 1) throw UsageError("--runs must be at least 1");
    if (algorithms.empty()) throw UsageError("no algorithms selected");
    if (jobs < 1) throw UsageError("--jobs must be at least 1");
    std::set<Algorithm> seen;
    for (Algorithm a : algorithms) {
        if (!seen.insert(a).second) throw UsageError("algorithm '" + std::string(algorithm_name(a)) + "' listed twice");
        if (mode == Mode::Bench && (a == Algorithm::KMEBB || a == Algorithm::KMeans)) {
            throw UsageError("algorithm '" + std::string(algorithm_name(a)) + "' is only valid in cluster mode");
        }
    }
    if (mode == Mode::Bench) {
        const auto kind = parse_benchmark(function);
        if (!kind) throw UsageError("unknown function '" + function + "'");
        const std::size_t min_dim = (*kind == BenchmarkKind::Rosenbrock || *kind == BenchmarkKind::DixonPrice) ? 2 : 1;
        if (dimension < min_dim) throw UsageError("--dim too small for '" + function + "'");
    } else {
        if (dataset.empty()) throw UsageError("--dataset is required in cluster mode");
        if (k < 1) throw UsageError("--k must be at least 1");
    }
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

ExperimentOutcome run_bench(const ExperimentPlan& plan) {
    if (plan.mode != Mode::Bench) throw UsageError("run_bench needs a bench plan");
    plan.validate();
    const BenchmarkFunction fn{*parse_benchmark(plan.function), plan.dimension};
    const ObjectiveSpec objective = make_objective(fn);
    auto run_one = [&](Algorithm alg, std::uint64_t seed) {
        OptimizerConfig config = plan.config;
        config.seed = seed;
        RunOutput out;
        out.trace = alg == Algorithm::BBBC ? optimize_bbbc(objective, config) : optimize_mebbbc(objective, config);
        out.final_cost = out.trace->final_best_cost;
        return out;
    };
    return execute(plan, plan.function, run_one, false);
}

ExperimentOutcome run_cluster(const ExperimentPlan& plan) {
    if (plan.mode != Mode::Cluster) throw UsageError("run_cluster needs a cluster plan");
    plan.validate();
    const Dataset data = load_csv(plan.dataset, plan.schema);
    data.validate();
    if (plan.k > data.size()) {
        throw UsageError("--k " + std::to_string(plan.k) + " exceeds the dataset size " + std::to_string(data.size()));
    }
    auto run_one = [&](Algorithm alg, std::uint64_t seed) {
        OptimizerConfig config = plan.config;
        config.seed = seed;
        RunOutput out;
        if (alg == Algorithm::KMeans) {
            const Matrix init = initial_centers(data.points, plan.k, seed);
            out.model = kmeans(data.points, plan.k, init, config.max_iters, plan.metric).model;
        } else {
            ClusterRun run = alg == Algorithm::BBBC     ? cluster_bbbc(data.points, plan.k, plan.metric, config)
                             : alg == Algorithm::MEBBBC ? cluster_mebbbc(data.points, plan.k, plan.metric, config)
                                                        : cluster_kmebb(data.points, plan.k, plan.metric, config,
                                                                        plan.refine_steps);
            out.model = std::move(run.model);
            out.trace = std::move(run.trace);
        }
        out.final_cost = out.model->cost;
        return out;
    };
    return execute(plan, data.name, run_one, true);
}

std::vector<ResultRecord> read_results(const fs::path& path) {
    const auto records = read_csv_records(path);
    if (records.empty()) throw FormatError("'" + path.string() + "' is empty");
    const auto& header = records.front();
    const std::size_t c_alg = column_of(header, "algorithm", path);
    const std::size_t c_target = column_of(header, "target", path);
    const std::size_t c_run = column_of(header, "run_index", path);
    const std::size_t c_seed = column_of(header, "seed", path);
    const std::size_t c_cost = column_of(header, "final_cost", path);
    std::vector<ResultRecord> out;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != header.size()) throw FormatError("'" + path.string() + "' row " + std::to_string(r + 1) + " is ragged");
        ResultRecord rr;
        rr.algorithm = rec[c_alg];
        rr.target = rec[c_target];
        rr.run_index = static_cast<std::size_t>(parse_number(rec[c_run], path, r + 1, c_run + 1));
        rr.seed = static_cast<std::uint64_t>(std::stoull(rec[c_seed]));
        rr.final_cost = parse_number(rec[c_cost], path, r + 1, c_cost + 1);
        out.push_back(std::move(rr));
    }
    return out;
}

std::vector<CompareRow> run_compare(const CompareOptions& options) {
    struct Side {
        std::string algorithm;
        std::vector<std::string> targets; // first-appearance order
        std::map<std::string, std::vector<double>> costs;
    };
    auto load_side = [](const fs::path& path, const std::optional<std::string>& wanted, const char* label) {
        const auto records = read_results(path);
        std::set<std::string> algs;
        for (const auto& r : records) algs.insert(r.algorithm);
        Side side;
        if (wanted) {
            if (!algs.contains(*wanted)) {
                throw UsageError(std::string(label) + ": no algorithm '" + *wanted + "' in '" + path.string() + "'");
            }
            side.algorithm = *wanted;
        } else if (algs.size() == 1) {
            side.algorithm = *algs.begin();
        } else {
            throw UsageError(std::string(label) + ": '" + path.string() +
                             "' holds several algorithms; select one with --alg-" + (label[0] == 'a' ? "a" : "b"));
        }
        for (const auto& r : records) {
            if (r.algorithm != side.algorithm) continue;
            if (!side.costs.contains(r.target)) side.targets.push_back(r.target);
            side.costs[r.target].push_back(r.final_cost);
        }
        return side;
    };

    const Side a = load_side(options.results_a, options.algorithm_a, "a");
    const Side b = load_side(options.results_b, options.algorithm_b, "b");

    std::vector<std::string> shared;
    for (const auto& t : a.targets) {
        if (b.costs.contains(t)) shared.push_back(t);
    }
    if (shared.empty()) throw UsageError("the two result files share no target");

    std::vector<CompareRow> rows;
    for (const auto& target : shared) {
        const auto& ca = a.costs.at(target);
        const auto& cb = b.costs.at(target);
        CompareRow row{"welch", target, std::nullopt, a.algorithm + " vs " + b.algorithm};
        if (ca.size() < 2 || cb.size() < 2) {
            row.note += "; not computed: each side needs at least 2 runs";
        } else if (summarize(ca).std == 0.0 && summarize(cb).std == 0.0) {
            // Degenerate: no spread on either side. Equal means cannot be told
            // apart; different means are separated with certainty.
            const bool same = summarize(ca).average == summarize(cb).average;
            const double n = static_cast<double>(ca.size() + cb.size() - 2);
            row.result = TestResult{same ? 0.0 : (summarize(ca).average < summarize(cb).average
                                                      ? -std::numeric_limits<double>::infinity()
                                                      : std::numeric_limits<double>::infinity()),
                                    same ? 1.0 : 0.0, n};
            row.note += "; both samples have zero variance";
        } else {
            row.result = welch_t_test(ca, cb);
        }
        rows.push_back(std::move(row));
    }

    if (shared.size() < 2) {
        rows.push_back({"friedman", "*", std::nullopt, "skipped: needs at least 2 shared targets"});
    } else {
        Matrix scores(shared.size(), 2);
        for (std::size_t i = 0; i < shared.size(); ++i) {
            scores(i, 0) = summarize(a.costs.at(shared[i])).average;
            scores(i, 1) = summarize(b.costs.at(shared[i])).average;
        }
        rows.push_back({"friedman", "*", friedman_test(scores),
                        "mean final cost, " + std::to_string(shared.size()) + " targets as blocks"});
    }

    prepare_output_dir(options.output_dir);
    std::string csv = "test,target,statistic,df,p_value,note\n";
    json arr = json::array();
    for (const auto& row : rows) {
        csv += row.test + ',' + row.target + ',';
        if (row.result) {
            csv += format_double(row.result->statistic) + ',' + format_double(row.result->df) + ',' +
                   format_double(row.result->p_value);
        } else {
            csv += ",,";
        }
        csv += ",\"" + row.note + "\"\n";
        json j = {{"test", row.test}, {"target", row.target}, {"note", row.note}};
        if (row.result) {
            j["statistic"] = row.result->statistic;
            j["df"] = row.result->df;
            j["p_value"] = row.result->p_value;
        }
        arr.push_back(std::move(j));
    }
    write_file(options.output_dir / "significance.csv", csv);
    if (options.json) write_file(options.output_dir / "significance.json", arr.dump(2) + '\n');
    return rows;
}

void verify_outputs(const fs::path& dir) {
    const fs::path plan_path = dir / "plan.json";
    std::ifstream plan_in(plan_path);
    if (!plan_in) throw std::ios_base::failure("cannot open '" + plan_path.string() + "'");
    json plan;
    try {
        plan = json::parse(plan_in);
    } catch (const json::exception& e) {
        throw FormatError("'" + plan_path.string() + "': " + e.what());
    }

    const auto records = read_results(dir / "results.csv");
    std::vector<std::pair<std::string, std::string>> groups;
    std::map<std::pair<std::string, std::string>, std::vector<double>> costs;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.algorithm, r.target);
        if (!costs.contains(key)) groups.push_back(key);
        costs[key].push_back(r.final_cost);
    }
    const std::size_t runs = plan.at("runs").get<std::size_t>();
    const std::size_t n_algs = plan.at("algorithms").size();
    if (records.size() != runs * n_algs) {
        throw VerificationError("results.csv has " + std::to_string(records.size()) + " rows, expected " +
                                std::to_string(runs * n_algs));
    }

    const auto summary = read_csv_records(dir / "summary.csv");
    if (summary.size() != groups.size() + 1) {
        throw VerificationError("summary.csv has " + std::to_string(summary.size() - 1) + " rows, expected " +
                                std::to_string(groups.size()));
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& row = summary[i + 1];
        const RunSummary s = summarize(costs.at(groups[i]));
        const std::vector<std::string> expected = {groups[i].first,      groups[i].second,   format_double(s.best),
                                                   format_double(s.average), format_double(s.std),
                                                   std::to_string(s.n_runs)};
        if (row != expected) {
            throw VerificationError("summary.csv row " + std::to_string(i + 2) + " (" + groups[i].first +
                                    ") does not match results.csv");
        }
    }

    const std::size_t max_iters = plan.at("max_iters").get<std::size_t>();
    const bool early_stop = plan.at("stall_tolerance").get<double>() > 0.0;
    for (const auto& alg_json : plan.at("algorithms")) {
        const std::string alg = alg_json.get<std::string>();
        if (alg == "kmeans") continue;
        for (std::size_t run = 0; run < runs; ++run) {
            const fs::path trace = dir / ("trace_" + alg + "_" + std::to_string(run) + ".csv");
            if (!fs::exists(trace)) throw VerificationError("missing " + trace.filename().string());
            const auto rows = read_csv_records(trace);
            const std::size_t n = rows.empty() ? 0 : rows.size() - 1;
            if (early_stop ? (n < 1 || n > max_iters) : n != max_iters) {
                throw VerificationError(trace.filename().string() + " has " + std::to_string(n) + " rows, expected " +
                                        std::to_string(max_iters));
            }
            double previous = std::numeric_limits<double>::infinity();
            for (std::size_t r = 1; r < rows.size(); ++r) {
                const double best = parse_number(rows[r].at(1), trace, r + 1, 2);
                if (best > previous) {
                    throw VerificationError(trace.filename().string() + ": best_so_far increases at row " +
                                            std::to_string(r + 1));
                }
                previous = best;
            }
        }
    }
}

}  // namespace mebb
