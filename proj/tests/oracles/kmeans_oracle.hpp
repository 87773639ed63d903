#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

// Exhaustive k-means reference for tiny inputs: tries every assignment of n
// points to k non-empty clusters and keeps the lowest within-cluster sum of
// squares. Independent of the library's clustering code.
namespace zeus::oracle {

using Point = std::vector<double>;

struct Partition {
    std::vector<int> labels;
    double inertia = std::numeric_limits<double>::infinity();
    std::vector<Point> centroids;
};

inline double sq_dist(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

inline std::vector<Point> means(const std::vector<Point>& pts, const std::vector<int>& labels, int k) {
    std::vector<Point> c(static_cast<std::size_t>(k), Point(pts[0].size(), 0.0));
    std::vector<int> n(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto& ci = c[static_cast<std::size_t>(labels[i])];
        for (std::size_t d = 0; d < ci.size(); ++d) ci[d] += pts[i][d];
        ++n[static_cast<std::size_t>(labels[i])];
    }
    for (std::size_t j = 0; j < c.size(); ++j) {
        for (auto& x : c[j]) x /= n[j];
    }
    return c;
}

inline Partition best_partition(const std::vector<Point>& pts, int k) {
    const std::size_t n = pts.size();
    Partition best;
    std::vector<int> labels(n, 0);
    for (;;) {
        std::vector<bool> used(static_cast<std::size_t>(k), false);
        for (int l : labels) used[static_cast<std::size_t>(l)] = true;
        if (std::all_of(used.begin(), used.end(), [](bool b) { return b; })) {
            const auto c = means(pts, labels, k);
            double inertia = 0.0;
            for (std::size_t i = 0; i < n; ++i) inertia += sq_dist(pts[i], c[static_cast<std::size_t>(labels[i])]);
            if (inertia < best.inertia) best = {labels, inertia, c};
        }
        std::size_t i = 0;
        while (i < n && ++labels[i] == k) labels[i++] = 0;
        if (i == n) break;
    }
    return best;
}

// For each cluster, the id of the member closest to the centroid (ties by id).
inline std::vector<std::string> representatives(const std::vector<Point>& pts, const std::vector<std::string>& ids,
                                                const Partition& p) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < p.centroids.size(); ++j) {
        std::size_t pick = pts.size();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (p.labels[i] != static_cast<int>(j)) continue;
            if (pick == pts.size()) {
                pick = i;
                continue;
            }
            const double di = sq_dist(pts[i], p.centroids[j]);
            const double dp = sq_dist(pts[pick], p.centroids[j]);
            if (di < dp || (di == dp && ids[i] < ids[pick])) pick = i;
        }
        out.push_back(ids[pick]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace zeus::oracle
