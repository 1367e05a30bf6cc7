#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mebb/objective.hpp"
#include "mebb/random.hpp"

using namespace mebb;

namespace {

const std::vector<double> kProbe{0.7, -1.3, 2.2};

double eval(BenchmarkKind kind, const std::vector<double>& x) {
    return evaluate(BenchmarkFunction{kind, x.size()}, x);
}

}  // namespace

TEST_CASE("named examples") {
    CHECK(eval(BenchmarkKind::Sphere, {0, 0, 0}) == 0.0);
    CHECK(eval(BenchmarkKind::Rastrigin, std::vector<double>(7, 0.0)) == 0.0);
    CHECK(eval(BenchmarkKind::Rosenbrock, {1, 1}) == 0.0);
    CHECK(eval(BenchmarkKind::Step, {0.4, -0.3}) == 0.0);
    CHECK(eval(BenchmarkKind::Levy, std::vector<double>(5, 1.0)) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval(BenchmarkKind::Step, {0.5, -0.5}) == 1.0); // floor(1) = 1, floor(0) = 0
}

TEST_CASE("values against an independent reference at a probe point") {
    // Reference values computed once with a separate Python implementation.
    CHECK(eval(BenchmarkKind::Rastrigin, kProbe) == doctest::Approx(40.11016994374948).epsilon(1e-13));
    CHECK(eval(BenchmarkKind::Step, kProbe) == 6.0);
    CHECK(eval(BenchmarkKind::Sphere, kProbe) == doctest::Approx(0.49 + 1.69 + 4.84).epsilon(1e-15));
    CHECK(eval(BenchmarkKind::Rosenbrock, kProbe) == doctest::Approx(351.8).epsilon(1e-13));
    CHECK(eval(BenchmarkKind::Zakharov, kProbe) == doctest::Approx(43.04050625).epsilon(1e-13));
    CHECK(eval(BenchmarkKind::Levy, kProbe) == doctest::Approx(2.3116896287556963).epsilon(1e-13));
    CHECK(eval(BenchmarkKind::DixonPrice, kProbe) == doctest::Approx(376.136).epsilon(1e-13));
}

TEST_CASE("bounds per function") {
    const Bounds r = bounds_of({BenchmarkKind::Rastrigin, 2});
    CHECK(r.lower == std::vector<double>{-5.12, -5.12});
    CHECK(r.upper == std::vector<double>{5.12, 5.12});
    const Bounds z = bounds_of({BenchmarkKind::Zakharov, 3});
    CHECK(z.lower == std::vector<double>{-5, -5, -5});
    CHECK(z.upper == std::vector<double>{10, 10, 10});
    const Bounds s = bounds_of({BenchmarkKind::Sphere, 1});
    CHECK(s.lower == std::vector<double>{-100});
    CHECK(s.upper == std::vector<double>{100});
    CHECK(bounds_of({BenchmarkKind::Step, 4}).upper == std::vector<double>(4, 100.0));
    CHECK(bounds_of({BenchmarkKind::Rosenbrock, 2}).lower == std::vector<double>(2, -30.0));
    CHECK(bounds_of({BenchmarkKind::Levy, 2}).lower == std::vector<double>{-15, -15});
    CHECK(bounds_of({BenchmarkKind::Levy, 2}).upper == std::vector<double>{30, 30});
    CHECK(bounds_of({BenchmarkKind::DixonPrice, 2}).upper == std::vector<double>{10, 10});
}

TEST_CASE("known minima") {
    const KnownMinimum sphere = known_minimum({BenchmarkKind::Sphere, 4});
    CHECK(sphere.point == std::vector<double>(4, 0.0));
    CHECK(sphere.value == 0.0);
    const KnownMinimum rosen = known_minimum({BenchmarkKind::Rosenbrock, 6});
    CHECK(rosen.point == std::vector<double>(6, 1.0));
    CHECK(evaluate({BenchmarkKind::Rosenbrock, 6}, rosen.point) == 0.0);
    const KnownMinimum dp = known_minimum({BenchmarkKind::DixonPrice, 2});
    CHECK(dp.point[0] == 1.0);
    CHECK(dp.point[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(evaluate({BenchmarkKind::DixonPrice, 2}, dp.point) <= 1e-12);

    for (BenchmarkKind kind : all_benchmarks()) {
        for (std::size_t dim : {2u, 10u, 50u}) {
            const BenchmarkFunction fn{kind, dim};
            const KnownMinimum m = known_minimum(fn);
            CAPTURE(benchmark_name(kind));
            CAPTURE(dim);
            CHECK(m.value == 0.0);
            CHECK(evaluate(fn, m.point) <= 1e-12);
            CHECK(bounds_of(fn).contains(m.point));
        }
    }
}

TEST_CASE("random in-bounds points give finite nonnegative costs, evaluation is pure") {
    Rng rng(7);
    for (BenchmarkKind kind : all_benchmarks()) {
        for (std::size_t dim : {2u, 50u}) {
            const BenchmarkFunction fn{kind, dim};
            const Bounds b = bounds_of(fn);
            for (int s = 0; s < 1000; ++s) {
                std::vector<double> x(dim);
                for (std::size_t j = 0; j < dim; ++j) x[j] = rng.uniform(b.lower[j], b.upper[j]);
                const double f = evaluate(fn, x);
                REQUIRE(std::isfinite(f));
                REQUIRE(f >= 0.0);
                REQUIRE(evaluate(fn, x) == f);
            }
        }
    }
}

TEST_CASE("errors and names") {
    CHECK_THROWS_AS(evaluate({BenchmarkKind::Sphere, 3}, std::vector<double>{1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(evaluate({BenchmarkKind::Rosenbrock, 1}, std::vector<double>{1}), std::invalid_argument);
    CHECK_THROWS_AS(evaluate({BenchmarkKind::DixonPrice, 1}, std::vector<double>{1}), std::invalid_argument);
    CHECK(eval(BenchmarkKind::Sphere, {3}) == 9.0);

    for (BenchmarkKind kind : all_benchmarks()) CHECK(parse_benchmark(benchmark_name(kind)) == kind);
    CHECK(all_benchmarks().size() == 7);
    CHECK(parse_benchmark("dixonprice") == BenchmarkKind::DixonPrice);
    CHECK_FALSE(parse_benchmark("ackley").has_value());

    Bounds bad{{0.0, 1.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    Bounds mismatched{{0.0}, {1.0, 2.0}};
    CHECK_THROWS_AS(mismatched.validate(), std::invalid_argument);
}

TEST_CASE("objective spec wraps evaluate") {
    const BenchmarkFunction fn{BenchmarkKind::Zakharov, 3};
    const ObjectiveSpec spec = make_objective(fn);
    CHECK(spec.name == "zakharov");
    CHECK(spec.bounds.dimension() == 3);
    CHECK(spec(kProbe) == evaluate(fn, kProbe));
}
