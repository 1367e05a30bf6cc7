#include "mebb/objective.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mebb {

namespace {

constexpr std::array<BenchmarkKind, 7> kAllKinds = {
    BenchmarkKind::Rastrigin, BenchmarkKind::Step,  BenchmarkKind::Sphere,    BenchmarkKind::Rosenbrock,
    BenchmarkKind::Zakharov,  BenchmarkKind::Levy,  BenchmarkKind::DixonPrice,
};

constexpr double kPi = std::numbers::pi;

std::size_t min_dimension(BenchmarkKind kind) {
    return (kind == BenchmarkKind::Rosenbrock || kind == BenchmarkKind::DixonPrice) ? 2 : 1;
}

void check_dimension(const BenchmarkFunction& fn) {
    if (fn.dimension < min_dimension(fn.kind)) {
        throw std::invalid_argument(std::string(benchmark_name(fn.kind)) + ": dimension must be at least " +
                                    std::to_string(min_dimension(fn.kind)));
    }
}

double rastrigin(std::span<const double> x) {
    double sum = 0.0;
    for (double xi : x) sum += xi * xi - 10.0 * std::cos(2.0 * kPi * xi) + 10.0;
    return sum;
}

// De Jong step: the bracket is floor(x + 0.5).
double step(std::span<const double> x) {
    double sum = 0.0;
    for (double xi : x) {
        const double s = std::floor(xi + 0.5);
        sum += s * s;
    }
    return sum;
}

double sphere(std::span<const double> x) {
    double sum = 0.0;
    for (double xi : x) sum += xi * xi;
    return sum;
}

double rosenbrock(std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = x[i] - 1.0;
        sum += 100.0 * a * a + b * b;
    }
    return sum;
}

double zakharov(std::span<const double> x) {
    double squares = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        squares += x[i] * x[i];
        weighted += 0.5 * static_cast<double>(i + 1) * x[i];
    }
    const double w2 = weighted * weighted;
    return squares + w2 + w2 * w2;
}

double levy(std::span<const double> x) {
    const std::size_t n = x.size();
    auto w = [&](std::size_t i) { return 1.0 + (x[i] - 1.0) / 4.0; };
    const double s1 = std::sin(kPi * w(0));
    double sum = s1 * s1;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double wi = w(i);
        const double s = std::sin(kPi * wi + 1.0);
        sum += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * s * s);
    }
    const double wn = w(n - 1);
    const double sn = std::sin(2.0 * kPi * wn);
    sum += (wn - 1.0) * (wn - 1.0) * (1.0 + sn * sn);
    return sum;
}

double dixon_price(std::span<const double> x) {
    double sum = (x[0] - 1.0) * (x[0] - 1.0);
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double t = 2.0 * x[i] * x[i] - x[i - 1];
        sum += static_cast<double>(i + 1) * t * t;
    }
    return sum;
}

}  // namespace

void Bounds::validate() const {
    if (lower.empty() || lower.size() != upper.size()) {
        throw std::invalid_argument("Bounds: lower and upper must have equal, nonzero length");
    }
    for (std::size_t j = 0; j < lower.size(); ++j) {
        if (!(lower[j] < upper[j])) {
            throw std::invalid_argument("Bounds: lower < upper violated in dimension " + std::to_string(j));
        }
    }
}

bool Bounds::contains(std::span<const double> x) const {
    if (x.size() != lower.size()) return false;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] < lower[j] || x[j] > upper[j]) return false;
    }
    return true;
}

Bounds Bounds::uniform(std::size_t dim, double lo, double hi) {
    return Bounds{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

double evaluate(const BenchmarkFunction& fn, std::span<const double> x) {
    check_dimension(fn);
    if (x.size() != fn.dimension) {
        throw std::invalid_argument(std::string(benchmark_name(fn.kind)) + ": expected " +
                                    std::to_string(fn.dimension) + " components, got " + std::to_string(x.size()));
    }
    switch (fn.kind) {
        case BenchmarkKind::Rastrigin: return rastrigin(x);
        case BenchmarkKind::Step: return step(x);
        case BenchmarkKind::Sphere: return sphere(x);
        case BenchmarkKind::Rosenbrock: return rosenbrock(x);
        case BenchmarkKind::Zakharov: return zakharov(x);
        case BenchmarkKind::Levy: return levy(x);
        case BenchmarkKind::DixonPrice: return dixon_price(x);
    }
    throw std::invalid_argument("unknown benchmark kind");
}

Bounds bounds_of(const BenchmarkFunction& fn) {
    const std::size_t d = fn.dimension;
    switch (fn.kind) {
        case BenchmarkKind::Rastrigin: return Bounds::uniform(d, -5.12, 5.12);
        case BenchmarkKind::Step: return Bounds::uniform(d, -100.0, 100.0);
        case BenchmarkKind::Sphere: return Bounds::uniform(d, -100.0, 100.0);
        case BenchmarkKind::Rosenbrock: return Bounds::uniform(d, -30.0, 30.0);
        case BenchmarkKind::Zakharov: return Bounds::uniform(d, -5.0, 10.0);
        case BenchmarkKind::Levy: return Bounds::uniform(d, -15.0, 30.0);
        case BenchmarkKind::DixonPrice: return Bounds::uniform(d, -10.0, 10.0);
    }
    throw std::invalid_argument("unknown benchmark kind");
}

KnownMinimum known_minimum(const BenchmarkFunction& fn) {
    const std::size_t d = fn.dimension;
    switch (fn.kind) {
        case BenchmarkKind::Rosenbrock:
        case BenchmarkKind::Levy:
            return {std::vector<double>(d, 1.0), 0.0};
        case BenchmarkKind::DixonPrice: {
            // x_i = 2^{-(2^i - 2) / 2^i}, i counted from 1.
            std::vector<double> x(d);
            for (std::size_t i = 0; i < d; ++i) {
                const double p = std::ldexp(1.0, static_cast<int>(i + 1));
                x[i] = std::exp2(-(p - 2.0) / p);
            }
            return {std::move(x), 0.0};
        }
        default:
            return {std::vector<double>(d, 0.0), 0.0};
    }
}

ObjectiveSpec make_objective(const BenchmarkFunction& fn) {
    check_dimension(fn);
    return ObjectiveSpec{std::string(benchmark_name(fn.kind)), bounds_of(fn),
                         [fn](std::span<const double> x) { return evaluate(fn, x); }};
}

std::string_view benchmark_name(BenchmarkKind kind) {
    switch (kind) {
        case BenchmarkKind::Rastrigin: return "rastrigin";
        case BenchmarkKind::Step: return "step";
        case BenchmarkKind::Sphere: return "sphere";
        case BenchmarkKind::Rosenbrock: return "rosenbrock";
        case BenchmarkKind::Zakharov: return "zakharov";
        case BenchmarkKind::Levy: return "levy";
        case BenchmarkKind::DixonPrice: return "dixonprice";
    }
    return "unknown";
}

std::optional<BenchmarkKind> parse_benchmark(std::string_view name) {
    for (BenchmarkKind kind : kAllKinds) {
        if (benchmark_name(kind) == name) return kind;
    }
    return std::nullopt;
}

std::span<const BenchmarkKind> all_benchmarks() { return kAllKinds; }

}  // namespace mebb
