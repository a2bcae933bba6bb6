#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sakr/embed.hpp"

namespace sakr {

struct KMeansConfig {
    std::size_t m = 1;  // >= 1, <= point count
    std::uint64_t seed = 0;
    std::size_t max_iters = 100;
    double tol = 1e-4;  // relative inertia improvement threshold
};

struct Clustering {
    std::vector<std::vector<float>> centroids;        // plain member means
    std::map<std::string, std::size_t> assignment;    // doc_id -> cluster
    std::vector<std::size_t> sizes;                   // per cluster, none zero
    double inertia = 0.0;  // sum of squared member-to-centroid distances
    // Per-iteration inertia, non-increasing. Diagnostic only.
    std::vector<double> iteration_inertia;
};

// sqrt(2(1 - cos)). Exact L2 distance when both inputs are unit vectors.
double cos_distance(std::span<const float> a, std::span<const float> b);

// Lloyd iterations under cos_distance with D^2-weighted seeding from the
// config RNG. Empty clusters are reseeded with the point farthest from its
// centroid. Stops on assignment fixpoint (so assignments stay optimal for
// the returned centroids and centroids stay exact member means), with the
// inertia tolerance capping how long it polishes; max_iters bounds
// everything. Throws EmptyInput, TooManyClusters, DuplicateId.
Clustering kmeans(std::span<const EmbeddedDoc> points, const KMeansConfig& cfg);

// Nearest centroid by cos_distance, ties to the lowest index. Throws
// NoCentroids.
std::size_t assign_cluster(std::span<const float> vec,
                           std::span<const std::vector<float>> centroids);

// Mean silhouette s(i) = (b - a) / max(a, b) under cos_distance; singleton
// members score 0. Throws SingleCluster for m = 1, MismatchedClustering when
// a point is missing from the assignment.
double silhouette(std::span<const EmbeddedDoc> points, const Clustering& clustering);

// JSONL persistence: one centroid record per line, then an assignment block.
void save_clustering(std::ostream& out, const Clustering& clustering);
Clustering load_clustering(std::istream& in);

}  // namespace sakr
