#include <gtest/gtest.h>

#include <algorithm>
#include <array>

#include "kmeans_oracle.hpp"
#include "zeus/error.hpp"
#include "zeus/hashing.hpp"
#include "zeus/kmeans.hpp"

namespace zeus {
namespace {

const KMeansOptions kRaw{false, 300};

std::vector<EmbeddingVector> points(std::initializer_list<std::vector<double>> ps) {
    std::vector<EmbeddingVector> out;
    for (const auto& p : ps) out.push_back({p});
    return out;
}

TEST(KMeans, SeparatesTwoPairs) {
    const auto v = points({{0, 0}, {0, 1}, {10, 10}, {10, 11}});
    const auto r = kmeans_pp(v, 2, 1, kRaw);
    EXPECT_EQ(r.assignments[0], r.assignments[1]);
    EXPECT_EQ(r.assignments[2], r.assignments[3]);
    EXPECT_NE(r.assignments[0], r.assignments[2]);
    EXPECT_DOUBLE_EQ(r.inertia, 1.0);

    std::vector<oracle::Point> pts;
    for (const auto& e : v) pts.push_back(e.values);
    EXPECT_DOUBLE_EQ(oracle::best_partition(pts, 2).inertia, r.inertia);
}

TEST(KMeans, SingleClusterCentroidIsMean) {
    const auto v = points({{0, 0}, {2, 0}, {4, 3}});
    const auto r = kmeans_pp(v, 1, 0, kRaw);
    ASSERT_EQ(r.k(), 1);
    EXPECT_DOUBLE_EQ(r.centroids[0].values[0], 2.0);
    EXPECT_DOUBLE_EQ(r.centroids[0].values[1], 1.0);
    for (int a : r.assignments) EXPECT_EQ(a, 0);
}

TEST(KMeans, AsManyPointsAsClusters) {
    const auto v = points({{0, 0}, {1, 5}, {3, 3}});
    for (int k : {3, 5}) {
        const auto r = kmeans_pp(v, k, 0, kRaw);
        EXPECT_EQ(r.inertia, 0.0);
        EXPECT_EQ(r.assignments, (std::vector<int>{0, 1, 2}));
    }
}

TEST(KMeans, InvalidK) {
    const auto v = points({{0, 0}});
    EXPECT_THROW(kmeans_pp(v, 0, 0), ValidationError);
}

TEST(KMeans, DeterministicPerSeedAndInertiaNonIncreasing) {
    std::vector<EmbeddingVector> v;
    SplitMix64 rng(5);
    for (int i = 0; i < 60; ++i) v.push_back({{rng.uniform(), rng.uniform(), rng.uniform()}});
    const auto a = kmeans_pp(v, 5, 17);
    const auto b = kmeans_pp(v, 5, 17);
    EXPECT_EQ(a.assignments, b.assignments);
    EXPECT_EQ(a.inertia, b.inertia);
    for (std::size_t i = 1; i < a.inertia_history.size(); ++i) {
        EXPECT_LE(a.inertia_history[i], a.inertia_history[i - 1] + 1e-12);
    }
    EXPECT_TRUE(a.normalized);
    std::vector<EmbeddingVector> unit;
    for (const auto& e : v) unit.push_back(l2_normalized(e));
    EXPECT_NEAR(clustering_inertia(unit, a.assignments, a.centroids), a.inertia, 1e-12);
}

TEST(KMeans, DuplicatePointsStillFillClusters) {
    const auto v = points({{1, 1}, {1, 1}, {1, 1}, {1, 1}});
    const auto r = kmeans_pp(v, 2, 3, kRaw);
    EXPECT_EQ(r.k(), 2);
    EXPECT_EQ(r.inertia, 0.0);
}

TEST(KMeans, BestOfPicksLowestInertia) {
    std::vector<EmbeddingVector> v;
    SplitMix64 rng(8);
    for (int i = 0; i < 30; ++i) v.push_back({{rng.uniform(), rng.uniform()}});
    const std::array<std::uint64_t, 4> seeds{1, 2, 3, 4};
    const auto best = kmeans_best_of(v, 4, seeds, kRaw);
    for (auto s : seeds) EXPECT_LE(best.inertia, kmeans_pp(v, 4, s, kRaw).inertia);
}

TEST(NearestToCentroid, TieGoesToLowerId) {
    const auto v = points({{0, 0}, {0, 1}});
    const auto r = kmeans_pp(v, 1, 0, kRaw);
    const std::vector<std::string> ids{"q2", "q1"};
    EXPECT_EQ(nearest_to_centroid(r, v, ids), std::vector<std::string>{"q1"});
}

TEST(NearestToCentroid, SingletonAndCentralPoint) {
    const auto v = points({{0, 0}, {1, 0}, {2, 0}, {50, 50}});
    const auto r = kmeans_pp(v, 2, 0, kRaw);
    const std::vector<std::string> ids{"a", "b", "c", "d"};
    auto reps = nearest_to_centroid(r, v, ids);
    std::sort(reps.begin(), reps.end());
    EXPECT_EQ(reps, (std::vector<std::string>{"b", "d"}));
}

TEST(RankClusterMembers, OrderedByDistance) {
    const auto v = points({{0, 0}, {3, 0}, {1, 0}, {2.2, 0}});
    const auto r = kmeans_pp(v, 1, 0, kRaw);
    const std::vector<std::string> ids{"a", "b", "c", "d"};
    EXPECT_EQ(rank_cluster_members(r, v, ids, 0), (std::vector<std::size_t>{2, 3, 1, 0}));
}

TEST(Vectors, NormalizeAndDistance) {
    const EmbeddingVector v{{3, 4}};
    const auto n = l2_normalized(v);
    EXPECT_DOUBLE_EQ(n.values[0], 0.6);
    EXPECT_DOUBLE_EQ(n.values[1], 0.8);
    EXPECT_DOUBLE_EQ(squared_distance(v, EmbeddingVector{{0, 0}}), 25.0);
}

}  // namespace
}  // namespace zeus
