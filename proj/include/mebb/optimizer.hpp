#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mebb/matrix.hpp"
#include "mebb/objective.hpp"
#include "mebb/random.hpp"

namespace mebb {

/// How the big crunch contracts a population into the next center.
enum class CrunchRule {
    WeightedCenter, ///< inverse-cost center of mass (center_of_mass)
    BestStar,       ///< the cheapest star of the population
};

struct OptimizerConfig {
    std::size_t num_stars = 200;
    std::size_t max_iters = 100;
    std::size_t memory_capacity = 10;
    double alpha0 = 0.1;        ///< initial memory selection rate
    double alpha_growth = 0.01; ///< relative increase of alpha per iteration
    double alpha_cap = 1.0;
    std::uint64_t seed = 0;
    double epsilon_cost = 1e-12; ///< costs at or below this short-circuit the crunch
    std::size_t first_iteration = 1; ///< iteration index k used by the first big bang
    CrunchRule crunch = CrunchRule::WeightedCenter;
    /// Early stop when best-so-far improves by less than this over
    /// `stall_window` iterations. Zero disables it.
    double stall_tolerance = 0.0;
    std::size_t stall_window = 10;

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

/// Fixed-capacity archive of (point, cost) pairs. Once full, a newcomer
/// replaces the highest-cost entry only if it is strictly cheaper.
class SolutionMemory {
public:
    struct Entry {
        std::vector<double> point;
        double cost;
    };

    explicit SolutionMemory(std::size_t capacity);

    /// Returns true when the candidate was stored.
    bool insert(std::span<const double> point, double cost);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    bool full() const { return entries_.size() >= capacity_; }
    const std::vector<Entry>& entries() const { return entries_; }
    const Entry& operator[](std::size_t i) const { return entries_[i]; }

    /// Index of the highest-cost entry, lowest index on ties. Memory must be non-empty.
    std::size_t worst_index() const;
    double max_cost() const;
    double min_cost() const;

private:
    std::size_t capacity_;
    std::vector<Entry> entries_;
};

/// One component of a big-bang star: center + r * (upper - lower) / (1 + k),
/// clamped to [lower, upper].
double bang_component(double center, double lower, double upper, std::size_t iter_k, double r);

/// Gaussian cloud of `num_stars` points around `center` whose spread shrinks as
/// 1/(1+k). Consumes exactly one normal variate per component, star-major.
Matrix big_bang_classic(std::span<const double> center, const Bounds& bounds, std::size_t iter_k, Rng& rng,
                        std::size_t num_stars);

/// Big bang where each component is, with probability alpha, copied from a
/// uniformly chosen memory entry (index drawn per component). When alpha <= 0
/// or the memory is empty no selection draws are made, so the output and rng
/// consumption are identical to big_bang_classic.
Matrix big_bang_memory(std::span<const double> center, const SolutionMemory& memory, double alpha,
                       const Bounds& bounds, std::size_t iter_k, Rng& rng, std::size_t num_stars);

/// Inverse-cost weighted centroid of the population. If any cost is
/// <= epsilon_cost the cheapest point is returned as is.
std::vector<double> center_of_mass(const Matrix& population, std::span<const double> costs, double epsilon_cost);

/// min(alpha * (1 + growth), cap)
double alpha_update(double alpha, double growth, double cap);

/// Uniform random point inside the bounds. This is the first draw every run
/// makes from its rng, so other methods can reproduce a run's starting point.
std::vector<double> random_point(const Bounds& bounds, Rng& rng);

struct RunTrace {
    std::vector<std::vector<double>> best_point_per_iter;
    std::vector<double> best_cost_per_iter; ///< best-so-far, non-increasing
    std::vector<double> center_cost_per_iter;
    std::vector<double> final_best_point;
    double final_best_cost = 0.0;
    std::size_t evaluations = 0;        ///< starting point + every star
    std::size_t center_evaluations = 0; ///< one per iteration (none for CrunchRule::BestStar)
    double final_alpha = 0.0;
    std::uint64_t seed = 0;

    std::size_t iterations() const { return best_cost_per_iter.size(); }
};

struct IterationState {
    std::size_t iteration; ///< zero-based
    const Matrix& stars;
    std::span<const double> star_costs;
    std::span<const double> center;
    double center_cost;
    const SolutionMemory* memory; ///< null for the classic algorithm
    double alpha;                 ///< rate used by this iteration's big bang
    double best_cost;
};

/// Optional customisation points for a run.
struct RunHooks {
    /// Applied in place to each star before it is evaluated.
    std::function<void(std::span<double>)> refine_star;
    std::function<void(const IterationState&)> on_iteration;
};

/// Classic big bang / big crunch.
RunTrace optimize_bbbc(const ObjectiveSpec& objective, const OptimizerConfig& config, const RunHooks& hooks = {});

/// Memory-enriched variant: big bangs draw components from the memory of past
/// centers of mass with a growing rate alpha.
RunTrace optimize_mebbbc(const ObjectiveSpec& objective, const OptimizerConfig& config, const RunHooks& hooks = {});

}  // namespace mebb
