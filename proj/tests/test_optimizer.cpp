#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "mebb/objective.hpp"
#include "mebb/optimizer.hpp"
#include "oracles.hpp"

using namespace mebb;

namespace {

double sample_sd(std::span<const double> v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

OptimizerConfig small_config(std::uint64_t seed) {
    OptimizerConfig c;
    c.num_stars = 30;
    c.max_iters = 25;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("big bang component formula") {
    CHECK(bang_component(0.0, -1.0, 1.0, 1, 0.5) == 0.5);
    CHECK(bang_component(0.0, -1.0, 1.0, 1, 5.0) == 1.0);   // clamped high
    CHECK(bang_component(0.0, -1.0, 1.0, 1, -5.0) == -1.0); // clamped low
    CHECK(bang_component(2.0, 0.0, 4.0, 3, 1.0) == 3.0);    // 2 + 1 * 4 / 4
    CHECK(bang_component(0.3, 0.3, 0.3, 1, 2.7) == 0.3);    // zero width: stays at center
}

TEST_CASE("big_bang_classic shape, bounds and shrinkage") {
    const Bounds b = Bounds::uniform(3, -1.0, 1.0);
    Rng rng(1);
    const Matrix pop = big_bang_classic(std::vector<double>{0.0, 0.5, -0.5}, b, 1, rng, 500);
    CHECK(pop.rows() == 500);
    CHECK(pop.cols() == 3);
    for (std::size_t i = 0; i < pop.rows(); ++i) CHECK(b.contains(pop.row(i)));

    Rng rng2(2);
    const Matrix tight = big_bang_classic(std::vector<double>{0.0}, Bounds::uniform(1, -1.0, 1.0), 10000, rng2, 1000);
    CHECK(sample_sd(tight.flat()) < 0.01);

    Rng rng3(3);
    CHECK_THROWS_AS(big_bang_classic(std::vector<double>{0.0, 0.0}, Bounds::uniform(3, -1, 1), 1, rng3, 5),
                    std::invalid_argument);
}

TEST_CASE("big_bang_memory: alpha 0 and empty memory reproduce the classic draw bit for bit") {
    const Bounds b = Bounds::uniform(4, -10.0, 10.0);
    const std::vector<double> center{1, 2, 3, 4};
    SolutionMemory memory(3);
    memory.insert(std::vector<double>{9, 9, 9, 9}, 1.0);

    Rng a(11), c(11), e(11);
    const Matrix classic = big_bang_classic(center, b, 4, a, 50);
    CHECK(big_bang_memory(center, memory, 0.0, b, 4, c, 50) == classic);
    CHECK(big_bang_memory(center, SolutionMemory(3), 0.7, b, 4, e, 50) == classic);
    // Generators are left in the same state.
    const double next = a.uniform01();
    CHECK(next == c.uniform01());
    CHECK(next == e.uniform01());
}

TEST_CASE("big_bang_memory: alpha 1 copies memory") {
    const Bounds b = Bounds::uniform(2, -5.0, 5.0);
    SolutionMemory memory(4);
    memory.insert(std::vector<double>{1.5, -2.5}, 3.0);
    Rng rng(5);
    const Matrix pop = big_bang_memory(std::vector<double>{0, 0}, memory, 1.0, b, 1, rng, 100);
    for (std::size_t i = 0; i < pop.rows(); ++i) {
        CHECK(pop(i, 0) == 1.5);
        CHECK(pop(i, 1) == -2.5);
    }
}

TEST_CASE("big_bang_memory: selection proportion and uniform entry choice") {
    const Bounds wide = Bounds::uniform(2, -1000.0, 1000.0);
    SolutionMemory one(1);
    one.insert(std::vector<double>{1, 1}, 1.0);
    Rng rng(17);
    const Matrix pop = big_bang_memory(std::vector<double>{0, 0}, one, 0.5, wide, 1, rng, 10000);
    std::size_t copied = 0;
    for (double v : pop.flat()) copied += v == 1.0;
    const double fraction = static_cast<double>(copied) / static_cast<double>(pop.flat().size());
    CHECK(fraction == doctest::Approx(0.5).epsilon(0.04)); // ±0.02 absolute

    // Three entries, alpha 1: chi-square goodness of fit against uniform choice.
    SolutionMemory three(3);
    three.insert(std::vector<double>{0}, 1.0);
    three.insert(std::vector<double>{1}, 1.0);
    three.insert(std::vector<double>{2}, 1.0);
    Rng rng2(23);
    const Matrix picks = big_bang_memory(std::vector<double>{0}, three, 1.0, Bounds::uniform(1, -1, 3), 1, rng2, 30000);
    double counts[3] = {0, 0, 0};
    for (double v : picks.flat()) counts[static_cast<int>(v)] += 1;
    double chi2 = 0.0;
    for (double n : counts) chi2 += (n - 10000.0) * (n - 10000.0) / 10000.0;
    CHECK(chi2 < 13.8); // chi-square(2) 0.999 quantile
}

TEST_CASE("center_of_mass examples") {
    CHECK(center_of_mass(Matrix{{0.0}, {2.0}}, std::vector<double>{1, 1}, 1e-12) == std::vector<double>{1.0});
    CHECK(center_of_mass(Matrix{{0.0}, {3.0}}, std::vector<double>{1, 2}, 1e-12)[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(center_of_mass(Matrix{{5.0}, {9.0}}, std::vector<double>{0, 4}, 1e-12) == std::vector<double>{5.0});
    // The cheapest point wins when several are below epsilon.
    CHECK(center_of_mass(Matrix{{5.0}, {9.0}, {7.0}}, std::vector<double>{1e-13, 4, 0}, 1e-12) == std::vector<double>{7.0});
    CHECK_THROWS_AS(center_of_mass(Matrix(0, 2), std::vector<double>{}, 1e-12), std::invalid_argument);
    CHECK_THROWS_AS(center_of_mass(Matrix{{1.0}}, std::vector<double>{1, 2}, 1e-12), std::invalid_argument);
}

TEST_CASE("center_of_mass matches a direct weighted average and stays in the hull") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.index(20);
        const std::size_t d = 1 + rng.index(5);
        Matrix pop(n, d);
        std::vector<double> costs(n);
        for (std::size_t i = 0; i < n; ++i) {
            costs[i] = rng.uniform(0.1, 10.0);
            for (std::size_t j = 0; j < d; ++j) pop(i, j) = rng.uniform(-50.0, 50.0);
        }
        const auto got = center_of_mass(pop, costs, 1e-12);
        const auto want = oracle::weighted_center(pop, costs);
        for (std::size_t j = 0; j < d; ++j) {
            double lo = pop(0, j), hi = pop(0, j);
            for (std::size_t i = 1; i < n; ++i) {
                lo = std::min(lo, pop(i, j));
                hi = std::max(hi, pop(i, j));
            }
            CHECK(std::abs(got[j] - want[j]) <= 1e-12 * std::max(1.0, std::abs(want[j])));
            CHECK(got[j] >= lo);
            CHECK(got[j] <= hi);
        }
    }
}

TEST_CASE("solution memory examples") {
    SolutionMemory m(2);
    CHECK(m.insert(std::vector<double>{7}, 7.0));
    CHECK(m.size() == 1);
    CHECK(m[0].cost == 7.0);

    SolutionMemory full(2);
    full.insert(std::vector<double>{1}, 3.0); // a
    full.insert(std::vector<double>{2}, 9.0); // b
    CHECK(full.insert(std::vector<double>{3}, 5.0));
    CHECK(full[0].point == std::vector<double>{1});
    CHECK(full[0].cost == 3.0);
    CHECK(full[1].point == std::vector<double>{3});
    CHECK(full[1].cost == 5.0);

    CHECK_FALSE(full.insert(std::vector<double>{4}, 12.0));
    CHECK_FALSE(full.insert(std::vector<double>{4}, 5.0)); // equal to worst: not strictly better
    CHECK(full[1].point == std::vector<double>{3});

    SolutionMemory ties(3);
    ties.insert(std::vector<double>{0}, 4.0);
    ties.insert(std::vector<double>{1}, 4.0);
    ties.insert(std::vector<double>{2}, 1.0);
    CHECK(ties.worst_index() == 0);
    CHECK(ties.max_cost() == 4.0);
    CHECK(ties.min_cost() == 1.0);
    CHECK_THROWS_AS(SolutionMemory(0), std::invalid_argument);
}

TEST_CASE("solution memory invariants under random insertions") {
    Rng rng(4242);
    for (std::size_t capacity : {1u, 3u, 10u}) {
        SolutionMemory m(capacity);
        double last_max = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 10000; ++i) {
            m.insert(std::vector<double>{rng.uniform01()}, rng.uniform(0.0, 100.0));
            REQUIRE(m.size() <= capacity);
            if (m.full()) {
                REQUIRE(m.max_cost() <= last_max);
                last_max = m.max_cost();
            }
        }
    }
}

TEST_CASE("alpha schedule") {
    CHECK(alpha_update(0.1, 0.01, 1.0) == doctest::Approx(0.101).epsilon(1e-15));
    CHECK(alpha_update(0.999, 0.01, 1.0) == 1.0);
    double a = 0.1;
    for (int i = 0; i < 100; ++i) a = alpha_update(a, 0.01, 1.0);
    CHECK(a == doctest::Approx(0.1 * std::pow(1.01, 100)).epsilon(1e-12));
    CHECK(a == doctest::Approx(0.2705).epsilon(1e-3));
}

TEST_CASE("config validation") {
    OptimizerConfig c;
    CHECK_NOTHROW(c.validate());
    c.num_stars = 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.alpha0 = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.alpha0 = 0.5;
    c.alpha_cap = 0.4;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.memory_capacity = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.max_iters = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("optimize_bbbc on a 2-d sphere") {
    OptimizerConfig c;
    c.seed = 42;
    const ObjectiveSpec sphere = make_objective({BenchmarkKind::Sphere, 2});
    const RunTrace t = optimize_bbbc(sphere, c);
    CHECK(t.final_best_cost < 1.0);
    CHECK(t.iterations() == 100);
    CHECK(t.evaluations == 1 + 100 * 200);
    CHECK(t.center_evaluations == 100);
    CHECK(t.final_best_cost == t.best_cost_per_iter.back());
    CHECK(sphere(t.final_best_point) == t.final_best_cost);
    CHECK(t.seed == 42);
}

TEST_CASE("single iteration trace") {
    OptimizerConfig c = small_config(3);
    c.max_iters = 1;
    const ObjectiveSpec f = make_objective({BenchmarkKind::Rastrigin, 4});
    for (const RunTrace& t : {optimize_bbbc(f, c), optimize_mebbbc(f, c)}) {
        CHECK(t.iterations() == 1);
        CHECK(t.evaluations == c.num_stars + 1);
    }
}

TEST_CASE("determinism, monotonicity and in-bounds evaluation") {
    for (BenchmarkKind kind : all_benchmarks()) {
        const ObjectiveSpec f = make_objective({kind, 5});
        const OptimizerConfig c = small_config(static_cast<std::uint64_t>(kind) + 100);
        bool in_bounds = true;
        RunHooks hooks;
        hooks.on_iteration = [&](const IterationState& s) {
            for (std::size_t i = 0; i < s.stars.rows(); ++i) in_bounds = in_bounds && f.bounds.contains(s.stars.row(i));
            in_bounds = in_bounds && f.bounds.contains(s.center);
        };
        const RunTrace a = optimize_mebbbc(f, c, hooks);
        const RunTrace b = optimize_mebbbc(f, c);
        CHECK(in_bounds);
        CHECK(a.best_cost_per_iter == b.best_cost_per_iter);
        CHECK(a.center_cost_per_iter == b.center_cost_per_iter);
        CHECK(a.final_best_point == b.final_best_point);
        CHECK(optimize_bbbc(f, c).best_cost_per_iter == optimize_bbbc(f, c).best_cost_per_iter);
        for (std::size_t i = 1; i < a.iterations(); ++i) CHECK(a.best_cost_per_iter[i] <= a.best_cost_per_iter[i - 1]);
    }
}

TEST_CASE("memory variant: capacity, alpha schedule and memory dominance") {
    OptimizerConfig c = small_config(8);
    c.max_iters = 100;
    c.memory_capacity = 10;
    const ObjectiveSpec f = make_objective({BenchmarkKind::Levy, 6});
    std::size_t max_size = 0;
    double last_min = std::numeric_limits<double>::infinity();
    double last_full_max = std::numeric_limits<double>::infinity();
    bool dominance = true;
    std::vector<double> alphas;
    RunHooks hooks;
    hooks.on_iteration = [&](const IterationState& s) {
        REQUIRE(s.memory != nullptr);
        max_size = std::max(max_size, s.memory->size());
        dominance = dominance && s.memory->min_cost() <= last_min;
        last_min = s.memory->min_cost();
        if (s.memory->full()) {
            dominance = dominance && s.memory->max_cost() <= last_full_max;
            last_full_max = s.memory->max_cost();
        }
        alphas.push_back(s.alpha);
    };
    const RunTrace t = optimize_mebbbc(f, c, hooks);
    CHECK(max_size == 10);
    CHECK(dominance);
    CHECK(alphas.front() == 0.1);
    CHECK(t.final_alpha == doctest::Approx(0.1 * std::pow(1.01, 100)).epsilon(1e-12));

    RunHooks classic;
    bool null_memory = true;
    classic.on_iteration = [&](const IterationState& s) { null_memory = null_memory && s.memory == nullptr; };
    optimize_bbbc(f, c, classic);
    CHECK(null_memory);
}

TEST_CASE("best-star crunch and early stop") {
    const ObjectiveSpec f = make_objective({BenchmarkKind::Sphere, 3});
    OptimizerConfig c = small_config(5);
    c.crunch = CrunchRule::BestStar;
    const RunTrace t = optimize_mebbbc(f, c);
    CHECK(t.center_evaluations == 0);
    CHECK(t.evaluations == 1 + c.max_iters * c.num_stars);
    for (std::size_t i = 1; i < t.iterations(); ++i) CHECK(t.best_cost_per_iter[i] <= t.best_cost_per_iter[i - 1]);

    OptimizerConfig s = small_config(5);
    s.max_iters = 1000;
    s.stall_tolerance = 1e300; // nothing improves by this much
    s.stall_window = 3;
    const RunTrace stopped = optimize_bbbc(f, s);
    CHECK(stopped.iterations() == 4);
}

TEST_CASE("non-finite costs are rejected") {
    ObjectiveSpec bad{"nan", Bounds::uniform(2, -1, 1), [](std::span<const double>) { return std::nan(""); }};
    CHECK_THROWS_AS(optimize_bbbc(bad, small_config(1)), std::domain_error);
}
