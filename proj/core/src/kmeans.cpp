#include "zeus/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zeus/error.hpp"
#include "zeus/hashing.hpp"

namespace zeus {

double squared_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double x = a.values[i] - b.values[i];
        d += x * x;
    }
    return d;
}

EmbeddingVector l2_normalized(const EmbeddingVector& v) {
    double norm = 0.0;
    for (double x : v.values) norm += x * x;
    norm = std::sqrt(norm);
    EmbeddingVector out = v;
    if (norm > 0.0) {
        for (double& x : out.values) x /= norm;
    }
    return out;
}

double clustering_inertia(std::span<const EmbeddingVector> vectors, std::span<const int> assignments,
                          std::span<const EmbeddingVector> centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        total += squared_distance(vectors[i], centroids[static_cast<std::size_t>(assignments[i])]);
    }
    return total;
}

namespace {

std::vector<EmbeddingVector> prepare(std::span<const EmbeddingVector> vectors, bool normalize) {
    if (vectors.empty()) throw ValidationError("cannot cluster an empty set of vectors");
    const auto dim = vectors.front().dim();
    std::vector<EmbeddingVector> pts;
    pts.reserve(vectors.size());
    for (const auto& v : vectors) {
        if (v.dim() != dim) throw ValidationError("vectors to cluster differ in dimension");
        pts.push_back(normalize ? l2_normalized(v) : v);
    }
    return pts;
}

std::vector<std::size_t> seed_centers(const std::vector<EmbeddingVector>& pts, std::size_t k, SplitMix64& rng) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> chosen{rng.below(n)};
    std::vector<bool> taken(n, false);
    taken[chosen[0]] = true;
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(pts[i], pts[chosen[0]]);
    while (chosen.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += taken[i] ? 0.0 : d2[i];
        std::size_t pick = n;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i] || d2[i] <= 0.0) continue;
                acc += d2[i];
                pick = i;
                if (acc > r) break;
            }
        } else {
            for (std::size_t i = 0; i < n && pick == n; ++i) {
                if (!taken[i]) pick = i;
            }
        }
        chosen.push_back(pick);
        taken[pick] = true;
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(pts[i], pts[pick]));
    }
    return chosen;
}

// Returns true when any assignment changed.
bool assign(const std::vector<EmbeddingVector>& pts, const std::vector<EmbeddingVector>& centroids,
            std::vector<int>& assignments) {
    bool changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        int best = 0;
        double best_d = squared_distance(pts[i], centroids[0]);
        for (std::size_t c = 1; c < centroids.size(); ++c) {
            const double d = squared_distance(pts[i], centroids[c]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        const int current = assignments[i];
        if (current >= 0 && current != best &&
            squared_distance(pts[i], centroids[static_cast<std::size_t>(current)]) == best_d) {
            best = current;
        }
        if (best != current) {
            assignments[i] = best;
            changed = true;
        }
    }
    return changed;
}

std::vector<EmbeddingVector> means(const std::vector<EmbeddingVector>& pts, const std::vector<int>& assignments,
                                   std::size_t k) {
    const std::size_t dim = pts.front().dim();
    std::vector<EmbeddingVector> centroids(k, EmbeddingVector{std::vector<double>(dim, 0.0)});
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto c = static_cast<std::size_t>(assignments[i]);
        ++sizes[c];
        for (std::size_t d = 0; d < dim; ++d) centroids[c].values[d] += pts[i].values[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) continue;
        for (double& x : centroids[c].values) x /= static_cast<double>(sizes[c]);
    }
    return centroids;
}

// Moves points into empty clusters; returns updated centroids.
std::vector<EmbeddingVector> update(const std::vector<EmbeddingVector>& pts, std::vector<int>& assignments,
                                    std::size_t k) {
    auto centroids = means(pts, assignments, k);
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<std::size_t> sizes(k, 0);
        for (int a : assignments) ++sizes[static_cast<std::size_t>(a)];
        if (sizes[c] != 0) continue;
        std::size_t far = pts.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto a = static_cast<std::size_t>(assignments[i]);
            if (sizes[a] <= 1) continue;
            const double d = squared_distance(pts[i], centroids[a]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far == pts.size()) break;  // cannot happen while n > k
        assignments[far] = static_cast<int>(c);
        centroids = means(pts, assignments, k);
    }
    return centroids;
}

}  // namespace

ClusteringResult kmeans_pp(std::span<const EmbeddingVector> vectors, int k, std::uint64_t seed,
                           const KMeansOptions& options) {
    if (k <= 0) throw ValidationError("k must be positive");
    const auto pts = prepare(vectors, options.normalize);
    const std::size_t n = pts.size();
    ClusteringResult r;
    r.seed = seed;
    r.normalized = options.normalize;

    if (n <= static_cast<std::size_t>(k)) {
        r.assignments.resize(n);
        std::iota(r.assignments.begin(), r.assignments.end(), 0);
        r.centroids = pts;
        r.inertia = 0.0;
        r.inertia_history = {0.0};
        return r;
    }

    const auto kk = static_cast<std::size_t>(k);
    SplitMix64 rng(seed);
    std::vector<EmbeddingVector> centroids;
    for (std::size_t idx : seed_centers(pts, kk, rng)) centroids.push_back(pts[idx]);

    std::vector<int> assignments(n, -1);
    assign(pts, centroids, assignments);
    for (int it = 0; it < options.max_iterations; ++it) {
        centroids = update(pts, assignments, kk);
        r.iterations = it + 1;
        const bool changed = assign(pts, centroids, assignments);
        r.inertia_history.push_back(clustering_inertia(pts, assignments, centroids));
        if (!changed) break;
    }
    r.assignments = std::move(assignments);
    r.centroids = means(pts, r.assignments, kk);
    r.inertia = clustering_inertia(pts, r.assignments, r.centroids);
    return r;
}

ClusteringResult kmeans_best_of(std::span<const EmbeddingVector> vectors, int k, std::span<const std::uint64_t> seeds,
                                const KMeansOptions& options) {
    if (seeds.empty()) throw ValidationError("kmeans_best_of needs at least one seed");
    ClusteringResult best = kmeans_pp(vectors, k, seeds.front(), options);
    for (std::size_t i = 1; i < seeds.size(); ++i) {
        auto r = kmeans_pp(vectors, k, seeds[i], options);
        if (r.inertia < best.inertia) best = std::move(r);
    }
    return best;
}

std::vector<std::size_t> rank_cluster_members(const ClusteringResult& result, std::span<const EmbeddingVector> vectors,
                                              std::span<const std::string> ids, int cluster) {
    if (vectors.size() != result.assignments.size() || ids.size() != vectors.size()) {
        throw ValidationError("clustering result does not match the given vectors");
    }
    const auto& centroid = result.centroids.at(static_cast<std::size_t>(cluster));
    std::vector<std::pair<double, std::size_t>> members;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (result.assignments[i] != cluster) continue;
        const auto v = result.normalized ? l2_normalized(vectors[i]) : vectors[i];
        members.emplace_back(squared_distance(v, centroid), i);
    }
    std::sort(members.begin(), members.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return ids[a.second] < ids[b.second];
    });
    std::vector<std::size_t> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.second);
    return out;
}

std::vector<std::string> nearest_to_centroid(const ClusteringResult& result, std::span<const EmbeddingVector> vectors,
                                             std::span<const std::string> ids) {
    std::vector<std::string> out;
    for (int c = 0; c < result.k(); ++c) {
        const auto ranked = rank_cluster_members(result, vectors, ids, c);
        if (!ranked.empty()) out.push_back(ids[ranked.front()]);
    }
    return out;
}

}  // namespace zeus
