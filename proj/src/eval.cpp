#include "sakr/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "sakr/errors.hpp"

namespace sakr {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start)
        .count();
}

std::vector<EmbeddedDoc> embed_corpus(const std::vector<Document>& corpus,
                                      const EmbeddingConfig& cfg) {
    std::vector<EmbeddedDoc> out;
    out.reserve(corpus.size());
    for (const auto& doc : corpus) {
        out.push_back({doc.doc_id, embed_text(doc.combined_text, cfg)});
    }
    return out;
}

// All docs scored and ordered like an index snapshot, for the unfiltered
// modes.
std::vector<IndexEntry> full_snapshot(const RetrievalProfile& profile,
                                      const std::vector<EmbeddedDoc>& docs) {
    std::vector<IndexEntry> out;
    out.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        out.push_back({docs[i], profile_score(profile, docs[i].vec), i});
    }
    std::sort(out.begin(), out.end(), [](const IndexEntry& a, const IndexEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc.doc_id < b.doc.doc_id;
    });
    return out;
}

std::vector<EmbeddedDoc> snapshot_docs(const std::vector<IndexEntry>& snapshot) {
    std::vector<EmbeddedDoc> docs;
    docs.reserve(snapshot.size());
    for (const auto& e : snapshot) docs.push_back(e.doc);
    return docs;
}

std::vector<std::string> ranked_ids(const RetrievalResult& result) {
    std::vector<std::string> ids;
    ids.reserve(result.ranked.size());
    for (const auto& r : result.ranked) ids.push_back(r.doc_id);
    return ids;
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::string mode_name(EvalMode mode) {
    switch (mode) {
        case EvalMode::SAKR: return "SAKR";
        case EvalMode::naive: return "naive";
        case EvalMode::streaming_only: return "streaming_only";
        case EvalMode::clustering_only: return "clustering_only";
    }
    return "unknown";
}

std::string mode_table_label(EvalMode mode) {
    switch (mode) {
        case EvalMode::SAKR: return "SAKR";
        case EvalMode::naive: return "Naive RAG";
        case EvalMode::streaming_only: return "SAKR - Clustering";
        case EvalMode::clustering_only: return "SAKR-streaming";
    }
    return "unknown";
}

EvalMode parse_mode(const std::string& name) {
    if (name == "SAKR" || name == "sakr") return EvalMode::SAKR;
    if (name == "naive") return EvalMode::naive;
    if (name == "streaming_only") return EvalMode::streaming_only;
    if (name == "clustering_only") return EvalMode::clustering_only;
    throw BadConfig("unknown eval mode: " + name);
}

PRF precision_recall_f1(const std::vector<std::string>& retrieved,
                        const QrelSet& qrels, std::size_t k) {
    if (k == 0) throw BadConfig("K must be >= 1");
    if (retrieved.size() > k) {
        throw BadConfig("retrieved list longer than K");
    }
    std::size_t hits = 0;
    for (const auto& id : retrieved) {
        if (qrels.relevant.contains(id)) ++hits;
    }
    PRF out;
    out.precision = retrieved.empty()
                        ? 0.0
                        : static_cast<double>(hits) /
                              static_cast<double>(retrieved.size());
    if (qrels.relevant.empty()) {
        if (hits != 0) throw DegenerateQrels("hit in an empty relevant set");
        out.recall = 1.0;  // nothing relevant was missed
    } else {
        out.recall = static_cast<double>(hits) /
                     static_cast<double>(qrels.relevant.size());
    }
    double pr = out.precision + out.recall;
    out.f1 = pr > 0.0 ? 2.0 * out.precision * out.recall / pr : 0.0;
    return out;
}

MetricsReport run_mode(EvalMode mode, const std::vector<Document>& corpus,
                       const QrelSet& qrels, const std::string& query_id,
                       const std::string& query_text, const PipelineConfig& cfg) {
    auto embedded = embed_corpus(corpus, cfg.embedding);
    QueryVec query{query_id, embed_text(query_text, cfg.embedding)};
    RetrievalProfile profile{{query}, Aggregation::max};

    const bool streamed =
        mode == EvalMode::SAKR || mode == EvalMode::streaming_only;
    const bool clustered =
        mode == EvalMode::SAKR || mode == EvalMode::clustering_only;

    std::vector<IndexEntry> snapshot;
    if (streamed) {
        auto chunks = chunk_embedded(embedded, cfg.chunk_size);
        snapshot =
            build_from_stream(profile, chunks, cfg.capacity, cfg.index_mode)
                .snapshot();
    } else {
        snapshot = full_snapshot(profile, embedded);
    }

    MetricsReport rep;
    RetrievalResult result;
    if (clustered) {
        KMeansConfig kc = cfg.kmeans;
        kc.m = std::min(kc.m, snapshot.size());
        auto points = snapshot_docs(snapshot);
        auto clustering = kmeans(points, kc);
        std::size_t k_probe = std::min(cfg.k_probe, kc.m);
        result = clustered_retrieve(query, snapshot, clustering, k_probe,
                                    cfg.top_k, cfg.gate);
        rep.m = kc.m;
        if (cfg.with_silhouette && kc.m >= 2) {
            rep.silhouette = silhouette(points, clustering);
        }
    } else {
        result = naive_retrieve(query, snapshot, cfg.top_k, cfg.gate);
    }

    auto prf = precision_recall_f1(ranked_ids(result), qrels, cfg.top_k);
    rep.mode = mode_name(mode);
    rep.table_label = mode_table_label(mode);
    rep.K = cfg.top_k;
    rep.corpus_size = corpus.size();
    rep.retained = snapshot.size();
    rep.precision = prf.precision;
    rep.recall = prf.recall;
    rep.f1 = prf.f1;
    rep.memory_ratio_pct =
        streamed ? memory_ratio(cfg.capacity, corpus.size()) : 100.0;
    double us = static_cast<double>(result.elapsed.count());
    rep.latency_mean_us = us;
    rep.latency_median_us = us;
    rep.candidates_scanned_mean = static_cast<double>(result.candidates_scanned);
    return rep;
}

std::vector<SweepRow> sweep_clusters(const std::vector<std::size_t>& m_values,
                                     const std::vector<Document>& corpus,
                                     const QrelSet& qrels,
                                     const std::string& query_id,
                                     const std::string& query_text,
                                     const PipelineConfig& cfg) {
    std::vector<SweepRow> rows;
    rows.reserve(m_values.size());
    for (std::size_t m : m_values) {
        PipelineConfig point_cfg = cfg;
        point_cfg.kmeans.m = m;
        point_cfg.with_silhouette = m >= 2;
        auto rep = run_mode(EvalMode::SAKR, corpus, qrels, query_id, query_text,
                            point_cfg);
        SweepRow row;
        row.m = rep.m;
        row.accuracy = rep.precision;
        row.silhouette = rep.silhouette;
        row.median_latency_us = rep.latency_median_us;
        row.candidates_scanned = rep.candidates_scanned_mean;
        rows.push_back(row);
    }
    return rows;
}

SilhouettePair silhouette_compare(const std::vector<Document>& corpus,
                                  const std::string& query_text,
                                  const PipelineConfig& cfg) {
    auto embedded = embed_corpus(corpus, cfg.embedding);
    QueryVec query{"q", embed_text(query_text, cfg.embedding)};
    RetrievalProfile profile{{query}, Aggregation::max};

    // Both arms cluster their points in doc_id order so the comparison is
    // insensitive to corpus-vs-snapshot ordering; with full retention the two
    // arms then tie exactly.
    auto canonical = [](std::vector<EmbeddedDoc> points) {
        std::sort(points.begin(), points.end(),
                  [](const EmbeddedDoc& a, const EmbeddedDoc& b) {
                      return a.doc_id < b.doc_id;
                  });
        return points;
    };

    SilhouettePair pair;
    {
        auto points = canonical(embedded);
        KMeansConfig kc = cfg.kmeans;
        kc.m = std::min(kc.m, points.size());
        auto clustering = kmeans(points, kc);
        pair.before = silhouette(points, clustering);
    }
    {
        auto chunks = chunk_embedded(embedded, cfg.chunk_size);
        auto snapshot =
            build_from_stream(profile, chunks, cfg.capacity, cfg.index_mode)
                .snapshot();
        auto points = canonical(snapshot_docs(snapshot));
        KMeansConfig kc = cfg.kmeans;
        kc.m = std::min(kc.m, points.size());
        auto clustering = kmeans(points, kc);
        pair.after = silhouette(points, clustering);
    }
    return pair;
}

std::vector<BenchRow> bench_latency(const std::vector<std::size_t>& sizes,
                                    std::size_t n_queries,
                                    const SyntheticSpec& base_spec,
                                    const PipelineConfig& cfg) {
    std::vector<BenchRow> rows;
    for (std::size_t size : sizes) {
        SyntheticSpec spec = base_spec;
        spec.corpus_size = size;
        auto data = gen_synthetic(spec);

        // `size` is the snapshot size under comparison: retain everything.
        auto build_start = Clock::now();
        auto embedded = embed_corpus(data.corpus, cfg.embedding);
        QueryVec q0{data.query_id, embed_text(data.query_text, cfg.embedding)};
        RetrievalProfile profile{{q0}, Aggregation::max};
        auto chunks = chunk_embedded(embedded, cfg.chunk_size);
        auto snapshot =
            build_from_stream(profile, chunks, size, cfg.index_mode).snapshot();
        double build_ms = ms_since(build_start);

        auto cluster_start = Clock::now();
        KMeansConfig kc = cfg.kmeans;
        kc.m = std::min(kc.m, snapshot.size());
        auto clustering = kmeans(snapshot_docs(snapshot), kc);
        double cluster_ms = ms_since(cluster_start);
        std::size_t k_probe = std::min(cfg.k_probe, kc.m);

        std::vector<double> clustered_us, clustered_cand, naive_us, naive_cand;
        for (std::size_t v = 0; v < n_queries; ++v) {
            QueryVec q{"bench" + std::to_string(v),
                       embed_text(synthetic_query(spec, v), cfg.embedding)};
            auto cres = clustered_retrieve(q, snapshot, clustering, k_probe,
                                           cfg.top_k, cfg.gate);
            clustered_us.push_back(static_cast<double>(cres.elapsed.count()));
            clustered_cand.push_back(
                static_cast<double>(cres.candidates_scanned));
            auto nres = naive_retrieve(q, snapshot, cfg.top_k, cfg.gate);
            naive_us.push_back(static_cast<double>(nres.elapsed.count()));
            naive_cand.push_back(static_cast<double>(nres.candidates_scanned));
        }

        BenchRow clustered_row;
        clustered_row.size = size;
        clustered_row.method = "clustered";
        clustered_row.queries = n_queries;
        clustered_row.build_ms = build_ms;
        clustered_row.cluster_ms = cluster_ms;
        if (n_queries > 0) {
            clustered_row.median_latency_us = median(clustered_us);
            clustered_row.median_candidates_scanned = median(clustered_cand);
            clustered_row.amortized_cluster_us_per_query =
                cluster_ms * 1000.0 / static_cast<double>(n_queries);
        }
        rows.push_back(clustered_row);

        BenchRow naive_row;
        naive_row.size = size;
        naive_row.method = "naive";
        naive_row.queries = n_queries;
        naive_row.build_ms = build_ms;
        naive_row.cluster_ms = 0.0;
        if (n_queries > 0) {
            naive_row.median_latency_us = median(naive_us);
            naive_row.median_candidates_scanned = median(naive_cand);
        }
        rows.push_back(naive_row);
    }
    return rows;
}

}  // namespace sakr
