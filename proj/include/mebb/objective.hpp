#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mebb {

/// Per-dimension box constraints of a search space.
struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dimension() const { return lower.size(); }

    /// Throws std::invalid_argument unless lower/upper have equal length >= 1
    /// and lower[j] < upper[j] for every j.
    void validate() const;

    bool contains(std::span<const double> x) const;

    /// Uniform range [lo, hi] replicated over `dim` dimensions.
    static Bounds uniform(std::size_t dim, double lo, double hi);
};

enum class BenchmarkKind { Rastrigin, Step, Sphere, Rosenbrock, Zakharov, Levy, DixonPrice };

struct BenchmarkFunction {
    BenchmarkKind kind;
    std::size_t dimension;
};

/// A cost function over a bounded real vector space.
struct ObjectiveSpec {
    std::string name;
    Bounds bounds;
    std::function<double(std::span<const double>)> evaluator;

    double operator()(std::span<const double> x) const { return evaluator(x); }
};

struct KnownMinimum {
    std::vector<double> point;
    double value;
};

/// Evaluates the benchmark formula at x. Throws std::invalid_argument when
/// x.size() != fn.dimension or the dimension is too small for the function.
double evaluate(const BenchmarkFunction& fn, std::span<const double> x);

Bounds bounds_of(const BenchmarkFunction& fn);

/// Analytic minimizer of the implemented formula and its value (always 0).
KnownMinimum known_minimum(const BenchmarkFunction& fn);

/// Wraps a benchmark as an ObjectiveSpec named by its CLI identifier.
ObjectiveSpec make_objective(const BenchmarkFunction& fn);

/// Lowercase CLI identifier (`rastrigin`, `step`, ..., `dixonprice`).
std::string_view benchmark_name(BenchmarkKind kind);

std::optional<BenchmarkKind> parse_benchmark(std::string_view name);

/// All seven kinds in table order.
std::span<const BenchmarkKind> all_benchmarks();

}  // namespace mebb
