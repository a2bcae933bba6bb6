#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sakr/cluster.hpp"
#include "sakr/corpus.hpp"
#include "sakr/embed.hpp"
#include "sakr/hhindex.hpp"
#include "sakr/retrieve.hpp"

namespace sakr {

enum class EvalMode { SAKR, naive, streaming_only, clustering_only };

std::string mode_name(EvalMode mode);
// Row labels matching the paper-style ablation table.
std::string mode_table_label(EvalMode mode);
EvalMode parse_mode(const std::string& name);

struct MetricsReport {
    std::string mode;
    std::string table_label;
    std::size_t K = 0;
    std::size_t m = 0;  // 0 when the mode does not cluster
    std::size_t corpus_size = 0;
    std::size_t retained = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double memory_ratio_pct = 0.0;
    std::optional<double> silhouette;
    double latency_mean_us = 0.0;
    double latency_median_us = 0.0;
    double candidates_scanned_mean = 0.0;
};

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Precision/recall/F1 at K against binary judgments. An empty relevant set
// yields recall 1 when nothing retrieved is relevant (vacuously true for
// binary qrels); DegenerateQrels guards the impossible remainder.
PRF precision_recall_f1(const std::vector<std::string>& retrieved,
                        const QrelSet& qrels, std::size_t k);

// Synthetic labeled corpus: topic 0 is the query topic with a compact
// vocabulary (tight cluster); the other topics use wider disjoint
// vocabularies plus a shared noise pool.
struct SyntheticSpec {
    std::size_t corpus_size = 1000;
    double relevant_fraction = 0.1;  // in (0, 1)
    std::size_t topics = 8;          // >= 2
    double noise = 0.1;              // [0, 1)
    std::uint64_t seed = 0;
};

struct SyntheticData {
    std::vector<Document> corpus;
    std::map<std::string, QrelSet> qrels;
    std::string query_id;
    std::string query_text;
};

SyntheticData gen_synthetic(const SyntheticSpec& spec);

// The variant-th deterministic query over the relevant topic's vocabulary;
// variant 0 is the query gen_synthetic returns.
std::string synthetic_query(const SyntheticSpec& spec, std::size_t variant);

// Everything one pipeline run needs, with capacity/m already absolute.
struct PipelineConfig {
    EmbeddingConfig embedding;
    std::size_t capacity = 0;
    std::size_t chunk_size = 64;
    IndexMode index_mode = IndexMode::per_doc;
    KMeansConfig kmeans;
    std::size_t k_probe = 3;
    std::size_t top_k = 50;
    GateParams gate;
    bool with_silhouette = false;  // full-corpus silhouette is quadratic
};

// One pipeline execution: stream filter and/or clustering per the mode, one
// query, Table-style metrics. k_probe is clamped to the cluster count.
MetricsReport run_mode(EvalMode mode, const std::vector<Document>& corpus,
                       const QrelSet& qrels, const std::string& query_id,
                       const std::string& query_text, const PipelineConfig& cfg);

struct SweepRow {
    std::size_t m = 0;
    double accuracy = 0.0;  // precision@K
    std::optional<double> silhouette;  // absent for m = 1
    double median_latency_us = 0.0;
    double candidates_scanned = 0.0;
};

// One SAKR run per cluster count, shared seed.
std::vector<SweepRow> sweep_clusters(const std::vector<std::size_t>& m_values,
                                     const std::vector<Document>& corpus,
                                     const QrelSet& qrels,
                                     const std::string& query_id,
                                     const std::string& query_text,
                                     const PipelineConfig& cfg);

struct SilhouettePair {
    double before = 0.0;  // clustering the full corpus
    double after = 0.0;   // clustering the streaming-retained subset
};

SilhouettePair silhouette_compare(const std::vector<Document>& corpus,
                                  const std::string& query_text,
                                  const PipelineConfig& cfg);

struct BenchRow {
    std::size_t size = 0;
    std::string method;  // "clustered" | "naive"
    std::size_t queries = 0;
    std::optional<double> median_latency_us;
    std::optional<double> median_candidates_scanned;
    double build_ms = 0.0;    // snapshot construction
    double cluster_ms = 0.0;  // k-means, amortizable across queries
    std::optional<double> amortized_cluster_us_per_query;
};

// Clustered vs naive query cost over identical synthetic snapshots, one pair
// of rows per size. Clustering cost is reported separately and amortized.
std::vector<BenchRow> bench_latency(const std::vector<std::size_t>& sizes,
                                    std::size_t n_queries,
                                    const SyntheticSpec& base_spec,
                                    const PipelineConfig& cfg);

}  // namespace sakr
