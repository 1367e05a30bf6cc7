#include "mebb/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mebb {

void OptimizerConfig::validate() const {
    if (num_stars < 2) throw std::invalid_argument("OptimizerConfig: num_stars must be >= 2");
    if (max_iters < 1) throw std::invalid_argument("OptimizerConfig: max_iters must be >= 1");
    if (memory_capacity < 1) throw std::invalid_argument("OptimizerConfig: memory_capacity must be >= 1");
    if (!(alpha0 > 0.0 && alpha0 <= alpha_cap && alpha_cap <= 1.0)) {
        throw std::invalid_argument("OptimizerConfig: require 0 < alpha0 <= alpha_cap <= 1");
    }
    if (!(alpha_growth >= 0.0) || !std::isfinite(alpha_growth)) {
        throw std::invalid_argument("OptimizerConfig: alpha_growth must be finite and >= 0");
    }
    if (!(epsilon_cost > 0.0)) throw std::invalid_argument("OptimizerConfig: epsilon_cost must be > 0");
    if (first_iteration < 1) throw std::invalid_argument("OptimizerConfig: first_iteration must be >= 1");
    if (stall_tolerance < 0.0) throw std::invalid_argument("OptimizerConfig: stall_tolerance must be >= 0");
    if (stall_tolerance > 0.0 && stall_window < 1) {
        throw std::invalid_argument("OptimizerConfig: stall_window must be >= 1");
    }
}

SolutionMemory::SolutionMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw std::invalid_argument("SolutionMemory: capacity must be >= 1");
    entries_.reserve(capacity_);
}

bool SolutionMemory::insert(std::span<const double> point, double cost) {
    if (!entries_.empty() && point.size() != entries_.front().point.size()) {
        throw std::invalid_argument("SolutionMemory: candidate dimension mismatch");
    }
    if (!full()) {
        entries_.push_back({{point.begin(), point.end()}, cost});
        return true;
    }
    const std::size_t worst = worst_index();
    if (cost < entries_[worst].cost) {
        entries_[worst].point.assign(point.begin(), point.end());
        entries_[worst].cost = cost;
        return true;
    }
    return false;
}

std::size_t SolutionMemory::worst_index() const {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].cost > entries_[worst].cost) worst = i;
    }
    return worst;
}

double SolutionMemory::max_cost() const { return entries_.at(worst_index()).cost; }

double SolutionMemory::min_cost() const {
    double best = entries_.at(0).cost;
    for (const auto& e : entries_) best = std::min(best, e.cost);
    return best;
}

double bang_component(double center, double lower, double upper, std::size_t iter_k, double r) {
    const double value = center + r * (upper - lower) / (1.0 + static_cast<double>(iter_k));
    return std::clamp(value, lower, upper);
}

namespace {

void check_center(std::span<const double> center, const Bounds& bounds) {
    if (center.size() != bounds.dimension()) {
        throw std::invalid_argument("big bang: center has " + std::to_string(center.size()) +
                                    " components, bounds have " + std::to_string(bounds.dimension()));
    }
}

}  // namespace

Matrix big_bang_classic(std::span<const double> center, const Bounds& bounds, std::size_t iter_k, Rng& rng,
                        std::size_t num_stars) {
    check_center(center, bounds);
    const std::size_t dim = center.size();
    Matrix stars(num_stars, dim);
    for (std::size_t i = 0; i < num_stars; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            stars(i, j) = bang_component(center[j], bounds.lower[j], bounds.upper[j], iter_k, rng.normal());
        }
    }
    return stars;
}

Matrix big_bang_memory(std::span<const double> center, const SolutionMemory& memory, double alpha,
                       const Bounds& bounds, std::size_t iter_k, Rng& rng, std::size_t num_stars) {
    if (alpha <= 0.0 || memory.empty()) return big_bang_classic(center, bounds, iter_k, rng, num_stars);
    check_center(center, bounds);
    if (memory[0].point.size() != center.size()) {
        throw std::invalid_argument("big bang: memory dimension does not match center");
    }
    const std::size_t dim = center.size();
    Matrix stars(num_stars, dim);
    for (std::size_t i = 0; i < num_stars; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            if (rng.uniform01() < alpha) {
                stars(i, j) = memory[rng.index(memory.size())].point[j];
            } else {
                stars(i, j) = bang_component(center[j], bounds.lower[j], bounds.upper[j], iter_k, rng.normal());
            }
        }
    }
    return stars;
}

std::vector<double> center_of_mass(const Matrix& population, std::span<const double> costs, double epsilon_cost) {
    if (population.rows() == 0) throw std::invalid_argument("center_of_mass: empty population");
    if (costs.size() != population.rows()) {
        throw std::invalid_argument("center_of_mass: cost count does not match population size");
    }
    const std::size_t best = static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) - costs.begin());
    if (costs[best] <= epsilon_cost) {
        const auto row = population.row(best);
        return {row.begin(), row.end()};
    }
    std::vector<double> weighted(population.cols(), 0.0);
    std::vector<double> lo(population.row(0).begin(), population.row(0).end());
    std::vector<double> hi = lo;
    double total_weight = 0.0;
    for (std::size_t i = 0; i < population.rows(); ++i) {
        const double w = 1.0 / costs[i];
        total_weight += w;
        const auto row = population.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            weighted[j] += row[j] / costs[i];
            lo[j] = std::min(lo[j], row[j]);
            hi[j] = std::max(hi[j], row[j]);
        }
    }
    // A convex combination lies in the population's hull; rounding can push
    // it one ulp outside, so clamp.
    for (std::size_t j = 0; j < weighted.size(); ++j) weighted[j] = std::clamp(weighted[j] / total_weight, lo[j], hi[j]);
    return weighted;
}

double alpha_update(double alpha, double growth, double cap) { return std::min(alpha * (1.0 + growth), cap); }

std::vector<double> random_point(const Bounds& bounds, Rng& rng) {
    std::vector<double> x(bounds.dimension());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = rng.uniform(bounds.lower[j], bounds.upper[j]);
    return x;
}

namespace {

double checked_cost(const ObjectiveSpec& objective, std::span<const double> x) {
    const double cost = objective(x);
    if (!std::isfinite(cost)) throw std::domain_error("objective '" + objective.name + "' returned a non-finite cost");
    return cost;
}

RunTrace run(const ObjectiveSpec& objective, const OptimizerConfig& config, const RunHooks& hooks, bool with_memory) {
    config.validate();
    objective.bounds.validate();
    const Bounds& bounds = objective.bounds;

    Rng rng(config.seed);
    RunTrace trace;
    trace.seed = config.seed;

    std::vector<double> center = random_point(bounds, rng);
    double center_cost = checked_cost(objective, center);
    trace.evaluations = 1;

    std::vector<double> best_point = center;
    double best_cost = center_cost;

    SolutionMemory memory(config.memory_capacity);
    double alpha = config.alpha0;
    std::vector<double> costs(config.num_stars);

    for (std::size_t it = 0; it < config.max_iters; ++it) {
        const std::size_t k = config.first_iteration + it;
        Matrix stars = with_memory ? big_bang_memory(center, memory, alpha, bounds, k, rng, config.num_stars)
                                   : big_bang_classic(center, bounds, k, rng, config.num_stars);

        for (std::size_t i = 0; i < stars.rows(); ++i) {
            if (hooks.refine_star) hooks.refine_star(stars.row(i));
            costs[i] = checked_cost(objective, stars.row(i));
            if (costs[i] < best_cost) {
                best_cost = costs[i];
                best_point.assign(stars.row(i).begin(), stars.row(i).end());
            }
        }
        trace.evaluations += stars.rows();

        if (config.crunch == CrunchRule::BestStar) {
            const auto cheapest = static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) - costs.begin());
            center.assign(stars.row(cheapest).begin(), stars.row(cheapest).end());
            center_cost = costs[cheapest];
        } else {
            center = center_of_mass(stars, costs, config.epsilon_cost);
            center_cost = checked_cost(objective, center);
            ++trace.center_evaluations;
            if (center_cost < best_cost) {
                best_cost = center_cost;
                best_point = center;
            }
        }

        const double alpha_used = alpha;
        if (with_memory) {
            memory.insert(center, center_cost);
            alpha = alpha_update(alpha, config.alpha_growth, config.alpha_cap);
        }

        trace.best_point_per_iter.push_back(best_point);
        trace.best_cost_per_iter.push_back(best_cost);
        trace.center_cost_per_iter.push_back(center_cost);

        if (hooks.on_iteration) {
            hooks.on_iteration(IterationState{it, stars, costs, center, center_cost,
                                              with_memory ? &memory : nullptr, alpha_used, best_cost});
        }

        if (config.stall_tolerance > 0.0 && it >= config.stall_window) {
            const double earlier = trace.best_cost_per_iter[it - config.stall_window];
            if (earlier - best_cost < config.stall_tolerance) break;
        }
    }

    trace.final_best_point = best_point;
    trace.final_best_cost = best_cost;
    trace.final_alpha = alpha;
    return trace;
}

}  // namespace

RunTrace optimize_bbbc(const ObjectiveSpec& objective, const OptimizerConfig& config, const RunHooks& hooks) {
    return run(objective, config, hooks, false);
}

RunTrace optimize_mebbbc(const ObjectiveSpec& objective, const OptimizerConfig& config, const RunHooks& hooks) {
    return run(objective, config, hooks, true);
}

}  // namespace mebb
