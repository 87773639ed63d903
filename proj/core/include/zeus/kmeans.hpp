#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zeus/providers.hpp"

namespace zeus {

struct KMeansOptions {
    bool normalize = true;  // L2-normalize inputs before clustering
    int max_iterations = 300;
};

struct ClusteringResult {
    std::vector<int> assignments;  // per input vector
    std::vector<EmbeddingVector> centroids;
    double inertia = 0.0;
    std::uint64_t seed = 0;
    int iterations = 0;
    std::vector<double> inertia_history;  // after every Lloyd update
    bool normalized = true;

    int k() const noexcept { return static_cast<int>(centroids.size()); }
};

// k-means++ seeding driven by SplitMix64(seed), then Lloyd iterations until
// the assignment stops changing. Distances are squared Euclidean. On equal
// distances a point keeps its cluster, else joins the lowest index. A
// cluster that empties takes the point farthest from its centroid among
// clusters with more than one member. With n <= k every point is its own
// cluster.
ClusteringResult kmeans_pp(std::span<const EmbeddingVector> vectors, int k, std::uint64_t seed,
                           const KMeansOptions& options = {});

// Lowest-inertia result over `seeds` (first seed wins ties).
ClusteringResult kmeans_best_of(std::span<const EmbeddingVector> vectors, int k, std::span<const std::uint64_t> seeds,
                                const KMeansOptions& options = {});

// Members of `cluster` ordered by distance to its centroid, ties by id.
std::vector<std::size_t> rank_cluster_members(const ClusteringResult& result, std::span<const EmbeddingVector> vectors,
                                              std::span<const std::string> ids, int cluster);

// One representative id per non-empty cluster, in ascending cluster order.
std::vector<std::string> nearest_to_centroid(const ClusteringResult& result, std::span<const EmbeddingVector> vectors,
                                             std::span<const std::string> ids);

double squared_distance(const EmbeddingVector& a, const EmbeddingVector& b);
EmbeddingVector l2_normalized(const EmbeddingVector& v);

// Sum of squared distances from each vector to its assigned centroid.
double clustering_inertia(std::span<const EmbeddingVector> vectors, std::span<const int> assignments,
                          std::span<const EmbeddingVector> centroids);

}  // namespace zeus
