#include "mebb/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mebb/data.hpp"

namespace mebb {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        sum += diff * diff;
    }
    return sum;
}

struct Nearest {
    std::size_t index;
    double sq_distance;
};

Nearest nearest_center(std::span<const double> point, std::span<const double> flat, std::size_t k) {
    const std::size_t d = point.size();
    Nearest best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t c = 0; c < k; ++c) {
        const double dist = squared_distance(point, flat.subspan(c * d, d));
        if (dist < best.sq_distance) best = {c, dist};
    }
    return best;
}

void check_shapes(const Matrix& data, std::size_t k, std::size_t center_cols) {
    if (k == 0) throw std::invalid_argument("clustering: need at least one center");
    if (center_cols != data.cols()) {
        throw std::invalid_argument("clustering: centers have " + std::to_string(center_cols) +
                                    " features, data has " + std::to_string(data.cols()));
    }
}

void check_k(const Matrix& data, std::size_t k) {
    if (k == 0) throw std::invalid_argument("clustering: k must be >= 1");
    if (k > data.rows()) {
        throw std::invalid_argument("clustering: k = " + std::to_string(k) + " exceeds the number of points (" +
                                    std::to_string(data.rows()) + ")");
    }
}

}  // namespace

std::string_view metric_name(DistanceMetric metric) {
    return metric == DistanceMetric::SquaredEuclidean ? "sq" : "euclid";
}

std::optional<DistanceMetric> parse_metric(std::string_view name) {
    if (name == "sq" || name == "squared") return DistanceMetric::SquaredEuclidean;
    if (name == "euclid" || name == "euclidean") return DistanceMetric::Euclidean;
    return std::nullopt;
}

Matrix decode(std::span<const double> flat, std::size_t k, std::size_t d) {
    if (k == 0 || d == 0 || flat.size() != k * d) {
        throw std::invalid_argument("decode: encoding length " + std::to_string(flat.size()) + " != k*d = " +
                                    std::to_string(k) + "*" + std::to_string(d));
    }
    return Matrix(k, d, std::vector<double>(flat.begin(), flat.end()));
}

Matrix decode(const ClusterEncoding& encoding) { return decode(encoding.flat, encoding.k, encoding.d); }

ClusterEncoding encode(const Matrix& centers) {
    const auto flat = centers.flat();
    return {{flat.begin(), flat.end()}, centers.rows(), centers.cols()};
}

std::vector<std::size_t> assign(const Matrix& data, const Matrix& centers) {
    check_shapes(data, centers.rows(), centers.cols());
    std::vector<std::size_t> labels(data.rows());
    for (std::size_t n = 0; n < data.rows(); ++n) {
        labels[n] = nearest_center(data.row(n), centers.flat(), centers.rows()).index;
    }
    return labels;
}

double clustering_cost_flat(const Matrix& data, std::span<const double> flat, std::size_t k, DistanceMetric metric) {
    if (k == 0 || flat.size() != k * data.cols()) throw std::invalid_argument("clustering_cost: bad encoding length");
    double total = 0.0;
    for (std::size_t n = 0; n < data.rows(); ++n) {
        const double sq = nearest_center(data.row(n), flat, k).sq_distance;
        total += metric == DistanceMetric::SquaredEuclidean ? sq : std::sqrt(sq);
    }
    return total;
}

double clustering_cost(const Matrix& data, const Matrix& centers, DistanceMetric metric) {
    check_shapes(data, centers.rows(), centers.cols());
    return clustering_cost_flat(data, centers.flat(), centers.rows(), metric);
}

ClusterModel make_model(const Matrix& data, Matrix centers, DistanceMetric metric) {
    ClusterModel model;
    model.assignments = assign(data, centers);
    model.cost = clustering_cost(data, centers, metric);
    model.centers = std::move(centers);
    model.metric = metric;
    return model;
}

Matrix lloyd_step(const Matrix& data, const Matrix& centers) {
    check_shapes(data, centers.rows(), centers.cols());
    const std::size_t k = centers.rows();
    const std::size_t d = centers.cols();
    const std::vector<std::size_t> labels = assign(data, centers);

    Matrix next(k, d, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t n = 0; n < data.rows(); ++n) {
        auto row = next.row(labels[n]);
        const auto point = data.row(n);
        for (std::size_t j = 0; j < d; ++j) row[j] += point[j];
        ++counts[labels[n]];
    }

    bool any_empty = false;
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) {
            any_empty = true;
            continue;
        }
        for (double& v : next.row(c)) v /= static_cast<double>(counts[c]);
    }
    if (!any_empty) return next;

    // Distance of every point to its updated center, used to pick relocation targets.
    std::vector<double> spread(data.rows(), 0.0);
    for (std::size_t n = 0; n < data.rows(); ++n) {
        if (counts[labels[n]] > 0) spread[n] = squared_distance(data.row(n), next.row(labels[n]));
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] != 0) continue;
        std::size_t far = 0;
        for (std::size_t n = 1; n < data.rows(); ++n) {
            if (spread[n] >= spread[far]) far = n;
        }
        const auto point = data.row(far);
        std::copy(point.begin(), point.end(), next.row(c).begin());
        spread[far] = -1.0;
    }
    return next;
}

KMeansResult kmeans(const Matrix& data, std::size_t k, const Matrix& init_centers, std::size_t max_iter,
                    DistanceMetric metric) {
    check_k(data, k);
    if (init_centers.rows() != k) throw std::invalid_argument("kmeans: init_centers must have k rows");
    check_shapes(data, k, init_centers.cols());

    KMeansResult result;
    Matrix centers = init_centers;
    result.sse_history.push_back(clustering_cost(data, centers, DistanceMetric::SquaredEuclidean));
    for (std::size_t it = 0; it < max_iter; ++it) {
        Matrix next = lloyd_step(data, centers);
        ++result.iterations;
        double max_move = 0.0;
        for (std::size_t i = 0; i < next.flat().size(); ++i) {
            max_move = std::max(max_move, std::abs(next.flat()[i] - centers.flat()[i]));
        }
        centers = std::move(next);
        result.sse_history.push_back(clustering_cost(data, centers, DistanceMetric::SquaredEuclidean));
        if (max_move <= kKMeansTolerance) break;
    }
    result.model = make_model(data, std::move(centers), metric);
    return result;
}

Bounds encoding_bounds(const Matrix& data, std::size_t k) {
    const Bounds features = feature_bounds(data);
    Bounds b;
    b.lower.reserve(k * features.dimension());
    b.upper.reserve(k * features.dimension());
    for (std::size_t c = 0; c < k; ++c) {
        b.lower.insert(b.lower.end(), features.lower.begin(), features.lower.end());
        b.upper.insert(b.upper.end(), features.upper.begin(), features.upper.end());
    }
    return b;
}

ObjectiveSpec clustering_objective(const Matrix& data, std::size_t k, DistanceMetric metric) {
    check_k(data, k);
    return ObjectiveSpec{"clustering", encoding_bounds(data, k),
                         [&data, k, metric](std::span<const double> x) {
                             return clustering_cost_flat(data, x, k, metric);
                         }};
}

Matrix initial_centers(const Matrix& data, std::size_t k, std::uint64_t seed) {
    check_k(data, k);
    Rng rng(seed);
    return decode(random_point(encoding_bounds(data, k), rng), k, data.cols());
}

namespace {

enum class Method { Classic, Memory };

ClusterRun run_clustering(const Matrix& data, std::size_t k, DistanceMetric metric, const OptimizerConfig& config,
                          const RunHooks& hooks, Method method) {
    const ObjectiveSpec objective = clustering_objective(data, k, metric);
    ClusterRun out;
    out.trace = method == Method::Classic ? optimize_bbbc(objective, config, hooks)
                                          : optimize_mebbbc(objective, config, hooks);
    out.model = make_model(data, decode(out.trace.final_best_point, k, data.cols()), metric);
    return out;
}

}  // namespace

ClusterRun cluster_bbbc(const Matrix& data, std::size_t k, DistanceMetric metric, const OptimizerConfig& config,
                        const RunHooks& hooks) {
    return run_clustering(data, k, metric, config, hooks, Method::Classic);
}

ClusterRun cluster_mebbbc(const Matrix& data, std::size_t k, DistanceMetric metric, const OptimizerConfig& config,
                          const RunHooks& hooks) {
    return run_clustering(data, k, metric, config, hooks, Method::Memory);
}

ClusterRun cluster_kmebb(const Matrix& data, std::size_t k, DistanceMetric metric, const OptimizerConfig& config,
                         std::size_t refine_steps, const RunHooks& hooks) {
    if (refine_steps == 0) return cluster_mebbbc(data, k, metric, config, hooks);
    RunHooks refined = hooks;
    const std::size_t d = data.cols();
    auto user_refine = hooks.refine_star;
    // A caller-supplied refinement sees the raw star, before the Lloyd steps.
    refined.refine_star = [&data, k, d, refine_steps, user_refine](std::span<double> star) {
        if (user_refine) user_refine(star);
        Matrix centers = decode(star, k, d);
        for (std::size_t s = 0; s < refine_steps; ++s) centers = lloyd_step(data, centers);
        std::copy(centers.flat().begin(), centers.flat().end(), star.begin());
    };
    return run_clustering(data, k, metric, config, refined, Method::Memory);
}

}  // namespace mebb
