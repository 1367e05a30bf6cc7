#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <optional>
#include <vector>

#include "mebb/matrix.hpp"
#include "mebb/objective.hpp"
#include "mebb/optimizer.hpp"

namespace mebb {

enum class DistanceMetric { SquaredEuclidean, Euclidean };

std::string_view metric_name(DistanceMetric metric);

/// Accepts `sq`/`squared` and `euclid`/`euclidean`.
std::optional<DistanceMetric> parse_metric(std::string_view name);

/// k centers of dimension d stored cluster-major in one flat vector, the
/// search-space representation used by the population optimizers.
struct ClusterEncoding {
    std::vector<double> flat;
    std::size_t k = 0;
    std::size_t d = 0;
};

Matrix decode(const ClusterEncoding& encoding);
Matrix decode(std::span<const double> flat, std::size_t k, std::size_t d);
ClusterEncoding encode(const Matrix& centers);

struct ClusterModel {
    Matrix centers;
    std::vector<std::size_t> assignments;
    double cost = 0.0;
    DistanceMetric metric = DistanceMetric::Euclidean;
};

/// Index of the nearest center per point; ties go to the lowest index.
std::vector<std::size_t> assign(const Matrix& data, const Matrix& centers);

/// Sum over points of the distance to the nearest center.
double clustering_cost(const Matrix& data, const Matrix& centers, DistanceMetric metric);

/// Same as clustering_cost on decode(flat, k, data.cols()) without allocating.
double clustering_cost_flat(const Matrix& data, std::span<const double> flat, std::size_t k, DistanceMetric metric);

/// Assigns centers and recomputes the cost from scratch.
ClusterModel make_model(const Matrix& data, Matrix centers, DistanceMetric metric);

/// One Lloyd iteration. A center that receives no points moves onto the point
/// that is farthest from its (updated) nearest center; among equally far points
/// the last one is taken. Each point is used for at most one relocation.
Matrix lloyd_step(const Matrix& data, const Matrix& centers);

struct KMeansResult {
    ClusterModel model;
    std::vector<double> sse_history; ///< squared-Euclidean cost of the initial centers and after each step
    std::size_t iterations = 0;
};

inline constexpr double kKMeansTolerance = 1e-9;

/// Lloyd's algorithm from the given centers until no center component moves
/// by more than kKMeansTolerance or max_iter steps were taken. The returned
/// model's cost uses `metric`.
KMeansResult kmeans(const Matrix& data, std::size_t k, const Matrix& init_centers, std::size_t max_iter,
                    DistanceMetric metric = DistanceMetric::SquaredEuclidean);

/// Search box for encodings: per-feature data range replicated k times.
Bounds encoding_bounds(const Matrix& data, std::size_t k);

/// Fitness over encodings: clustering_cost of the decoded centers.
ObjectiveSpec clustering_objective(const Matrix& data, std::size_t k, DistanceMetric metric);

/// Centers a population optimizer seeded with `seed` starts from. Used to
/// give k-means the same initial conditions as the paired optimizer run.
Matrix initial_centers(const Matrix& data, std::size_t k, std::uint64_t seed);

struct ClusterRun {
    ClusterModel model;
    RunTrace trace;
};

ClusterRun cluster_bbbc(const Matrix& data, std::size_t k, DistanceMetric metric, const OptimizerConfig& config,
                        const RunHooks& hooks = {});

ClusterRun cluster_mebbbc(const Matrix& data, std::size_t k, DistanceMetric metric, const OptimizerConfig& config,
                          const RunHooks& hooks = {});

/// Memory-enriched clustering where every star is refined by `refine_steps`
/// Lloyd steps before it is evaluated. refine_steps == 0 reproduces
/// cluster_mebbbc exactly.
ClusterRun cluster_kmebb(const Matrix& data, std::size_t k, DistanceMetric metric, const OptimizerConfig& config,
                         std::size_t refine_steps, const RunHooks& hooks = {});

}  // namespace mebb
