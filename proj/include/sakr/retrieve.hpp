#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sakr/cluster.hpp"
#include "sakr/embed.hpp"
#include "sakr/hhindex.hpp"

namespace sakr {

// Sigmoid gate hyperparameters. The gate is a monotone transform of cosine,
// so it rescales reported probabilities without reordering documents.
struct GateParams {
    double alpha = 10.0;  // > 0
    double beta = 5.0;
};

// sigmoid(alpha * cos - beta). Throws BadAlpha.
double p_hh(double cos, const GateParams& params);

struct RankedDoc {
    std::string doc_id;
    double cos = 0.0;
    double p_hh = 0.0;
    std::int64_t cluster = -1;  // -1 for the unclustered full scan
};

struct RetrievalResult {
    std::string query_id;
    std::vector<RankedDoc> ranked;  // cos (= p_hh) descending, <= K entries
    std::size_t candidates_scanned = 0;
    std::vector<std::size_t> clusters_probed;
    std::chrono::microseconds elapsed{0};
};

// The k_probe cluster indices whose centroids are most cosine-similar to the
// query, descending, ties to the lowest index. Throws BadProbeCount.
std::vector<std::size_t> select_clusters(const QueryVec& query,
                                         const Clustering& clustering,
                                         std::size_t k_probe);

// Scans only the members of the probed clusters and gates them with p_hh.
// candidates_scanned counts the centroid comparisons too. Throws
// MismatchedClustering when the clustering does not cover the snapshot.
RetrievalResult clustered_retrieve(const QueryVec& query,
                                   std::span<const IndexEntry> snapshot,
                                   const Clustering& clustering,
                                   std::size_t k_probe, std::size_t top_k,
                                   const GateParams& params);

// Full-scan baseline over the snapshot.
RetrievalResult naive_retrieve(const QueryVec& query,
                               std::span<const IndexEntry> snapshot,
                               std::size_t top_k, const GateParams& params);

}  // namespace sakr
