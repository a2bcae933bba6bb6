#include "sakr/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sakr/errors.hpp"

namespace sakr {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

constexpr const char* kManifestSchema = "sakr-manifest/1";
constexpr const char* kMetricsSchema = "sakr-metrics/1";

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start)
        .count();
}

std::string csv_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct QueryText {
    std::string query_id;
    std::string text;
};

std::vector<QueryText> load_query_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open queries file: " + path);
    std::vector<QueryText> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("query_id") ||
            !rec.contains("text")) {
            throw InputError("malformed query record at " + path + ":" +
                             std::to_string(lineno));
        }
        out.push_back({rec["query_id"].get<std::string>(),
                       rec["text"].get<std::string>()});
    }
    if (out.empty()) throw InputError("queries file is empty: " + path);
    return out;
}

std::vector<Document> load_configured_corpus(const RunConfig& cfg) {
    if (cfg.corpus.empty()) throw BadConfig("paths.corpus is required");
    if (!fs::exists(cfg.corpus)) {
        throw InputError("corpus file not found: " + cfg.corpus);
    }
    return load_corpus(cfg.corpus, parse_corpus_format(cfg.corpus_format));
}

QrelSet load_configured_qrels(const RunConfig& cfg, const std::string& query_id) {
    if (cfg.qrels.empty()) throw BadConfig("paths.qrels is required");
    if (!fs::exists(cfg.qrels)) {
        throw InputError("qrels file not found: " + cfg.qrels);
    }
    auto qrels = load_qrels(cfg.qrels);
    auto it = qrels.find(query_id);
    if (it == qrels.end()) {
        throw InputError("no qrels for query \"" + query_id + "\" in " +
                         cfg.qrels);
    }
    return it->second;
}

QueryText first_configured_query(const RunConfig& cfg) {
    if (cfg.queries.empty()) throw BadConfig("paths.queries is required");
    return load_query_file(cfg.queries).front();
}

void ensure_output_dir(const RunConfig& cfg) {
    fs::create_directories(cfg.output_dir);
}

std::string artifact_path(const RunConfig& cfg, const char* name) {
    return (fs::path(cfg.output_dir) / name).string();
}

void require_artifact(const std::string& path) {
    if (!fs::exists(path)) throw ArtifactMissing(path);
}

std::string grid_csv(const std::vector<std::size_t>& k_values,
                     const std::vector<EvalMode>& modes,
                     const std::vector<MetricsReport>& reports) {
    std::ostringstream csv;
    csv << "k";
    for (EvalMode mode : modes) csv << ",accuracy_" << mode_name(mode);
    csv << "\n";
    for (std::size_t k : k_values) {
        csv << k;
        for (EvalMode mode : modes) {
            for (const auto& rep : reports) {
                if (rep.K == k && rep.mode == mode_name(mode)) {
                    csv << ',' << csv_num(rep.precision);
                    break;
                }
            }
        }
        csv << "\n";
    }
    return csv.str();
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

nlohmann::json metrics_report_to_json(const MetricsReport& rep) {
    nlohmann::json j;
    j["schema"] = kMetricsSchema;
    j["mode"] = rep.mode;
    j["table_label"] = rep.table_label;
    j["K"] = rep.K;
    j["m"] = rep.m;
    j["corpus_size"] = rep.corpus_size;
    j["retained"] = rep.retained;
    j["accuracy_metric"] = "precision_at_K";
    j["precision"] = rep.precision;
    j["recall"] = rep.recall;
    j["f1"] = rep.f1;
    j["memory_ratio_pct"] = rep.memory_ratio_pct;
    if (rep.silhouette) {
        j["silhouette"] = *rep.silhouette;
    } else {
        j["silhouette"] = nullptr;
    }
    j["latency_mean_us"] = rep.latency_mean_us;
    j["latency_median_us"] = rep.latency_median_us;
    j["candidates_scanned_mean"] = rep.candidates_scanned_mean;
    return j;
}

nlohmann::json retrieval_result_to_json(const RetrievalResult& result) {
    nlohmann::json j;
    j["query_id"] = result.query_id;
    j["candidates_scanned"] = result.candidates_scanned;
    j["clusters_probed"] = result.clusters_probed;
    j["elapsed_us"] = result.elapsed.count();
    nlohmann::json ranked = nlohmann::json::array();
    for (std::size_t r = 0; r < result.ranked.size(); ++r) {
        const auto& doc = result.ranked[r];
        ranked.push_back({{"rank", r + 1},
                          {"doc_id", doc.doc_id},
                          {"cos", doc.cos},
                          {"p_hh", doc.p_hh},
                          {"cluster", doc.cluster}});
    }
    j["ranked"] = std::move(ranked);
    return j;
}

void cmd_gen(const GenOptions& opts) {
    auto data = gen_synthetic(opts.spec);
    fs::create_directories(opts.out_dir);

    std::ostringstream corpus;
    for (const auto& doc : data.corpus) {
        nlohmann::json rec = {{"id", doc.doc_id},
                              {"headline", doc.headline},
                              {"keywords", doc.keywords},
                              {"abstract", doc.abstract}};
        corpus << rec.dump() << '\n';
    }
    write_file_atomic((fs::path(opts.out_dir) / "corpus.jsonl").string(),
                      corpus.str());

    std::ostringstream qrels;
    const QrelSet& q = data.qrels.at(data.query_id);
    for (const auto& doc_id : q.judged) {
        qrels << data.query_id << '\t' << doc_id << '\t'
              << (q.relevant.contains(doc_id) ? 1 : 0) << '\n';
    }
    write_file_atomic((fs::path(opts.out_dir) / "qrels.tsv").string(),
                      qrels.str());

    std::ostringstream queries;
    for (std::size_t v = 0; v < std::max<std::size_t>(opts.query_count, 1); ++v) {
        nlohmann::json rec = {{"query_id", "q" + std::to_string(v)},
                              {"text", synthetic_query(opts.spec, v)}};
        queries << rec.dump() << '\n';
    }
    write_file_atomic((fs::path(opts.out_dir) / "queries.jsonl").string(),
                      queries.str());
}

void cmd_build(const RunConfig& cfg) {
    auto corpus = load_configured_corpus(cfg);
    if (corpus.empty()) throw EmptyCorpus(cfg.corpus);
    if (cfg.queries.empty()) {
        throw BadConfig("paths.queries is required for build");
    }
    auto queries = load_query_file(cfg.queries);

    auto embed_start = Clock::now();
    RetrievalProfile profile;
    profile.aggregation = cfg.aggregation;
    for (const auto& q : queries) {
        profile.query_vecs.push_back(
            {q.query_id, embed_text(q.text, cfg.embedding)});
    }
    std::vector<EmbeddedDoc> embedded;
    embedded.reserve(corpus.size());
    for (const auto& doc : corpus) {
        embedded.push_back({doc.doc_id, embed_text(doc.combined_text, cfg.embedding)});
    }
    double embed_ms = ms_since(embed_start);

    auto build_start = Clock::now();
    std::size_t capacity = resolve_capacity(cfg, corpus.size());
    auto chunks = chunk_embedded(embedded, cfg.chunk_size);
    auto index = build_from_stream(profile, chunks, capacity, cfg.index_mode);
    auto snapshot = index.snapshot();
    double build_ms = ms_since(build_start);

    auto kmeans_start = Clock::now();
    KMeansConfig kc;
    kc.m = resolve_m(cfg, snapshot.size());
    kc.seed = cfg.kmeans_seed;
    kc.max_iters = cfg.max_iters;
    kc.tol = cfg.tol;
    std::vector<EmbeddedDoc> points;
    points.reserve(snapshot.size());
    for (const auto& e : snapshot) points.push_back(e.doc);
    auto clustering = kmeans(points, kc);
    double kmeans_ms = ms_since(kmeans_start);

    ensure_output_dir(cfg);
    {
        std::ostringstream out;
        save_index(out, index);
        write_file_atomic(artifact_path(cfg, "index.sakv"), out.str());
    }
    {
        std::ostringstream out;
        save_clustering(out, clustering);
        write_file_atomic(artifact_path(cfg, "clustering.jsonl"), out.str());
    }
    nlohmann::json manifest;
    manifest["schema"] = kManifestSchema;
    manifest["config_hash"] = config_hash(cfg);
    manifest["config"] = run_config_to_json(cfg);
    manifest["corpus_size"] = corpus.size();
    manifest["capacity"] = capacity;
    manifest["retained"] = snapshot.size();
    manifest["dim"] = cfg.embedding.dim;
    manifest["m"] = kc.m;
    manifest["timings_ms"] = {{"embed", embed_ms},
                              {"index_build", build_ms},
                              {"kmeans", kmeans_ms}};
    write_file_atomic(artifact_path(cfg, "manifest.json"),
                      manifest.dump(2) + "\n");
}

void cmd_query(const RunConfig& cfg, const QueryOptions& opts) {
    const std::string manifest_path = artifact_path(cfg, "manifest.json");
    const std::string index_path = artifact_path(cfg, "index.sakv");
    const std::string clustering_path = artifact_path(cfg, "clustering.jsonl");
    require_artifact(manifest_path);
    require_artifact(index_path);
    if (!opts.naive) require_artifact(clustering_path);

    nlohmann::json manifest;
    {
        std::ifstream in(manifest_path);
        manifest = nlohmann::json::parse(in, nullptr, false);
        if (manifest.is_discarded() || !manifest.contains("schema") ||
            manifest["schema"] != kManifestSchema) {
            throw InputError("manifest schema mismatch at " + manifest_path);
        }
    }
    // The build-time embedding settings win; a config mismatch here would
    // silently break every similarity.
    EmbeddingConfig embedding;
    embedding.dim = manifest["config"]["embedding"]["dim"].get<std::uint32_t>();
    embedding.hash_seed =
        manifest["config"]["embedding"]["seed"].get<std::uint64_t>();
    embedding.lowercase =
        manifest["config"]["embedding"]["lowercase"].get<bool>();

    LoadedIndex loaded;
    {
        std::ifstream in(index_path, std::ios::binary);
        loaded = load_index(in);
    }

    Clustering clustering;
    if (!opts.naive) {
        std::ifstream in(clustering_path);
        clustering = load_clustering(in);
    }

    std::vector<QueryText> queries;
    if (opts.text) {
        queries.push_back({"q0", *opts.text});
    } else {
        if (cfg.queries.empty()) {
            throw BadConfig("pass --text or set paths.queries");
        }
        queries = load_query_file(cfg.queries);
    }

    std::ostringstream out;
    for (const auto& q : queries) {
        QueryVec qv{q.query_id, embed_text(q.text, embedding)};
        RetrievalResult result;
        if (opts.naive) {
            result = naive_retrieve(qv, loaded.entries, cfg.top_k, cfg.gate);
        } else {
            std::size_t k_probe =
                std::min(cfg.k_probe, clustering.centroids.size());
            result = clustered_retrieve(qv, loaded.entries, clustering, k_probe,
                                        cfg.top_k, cfg.gate);
        }
        out << retrieval_result_to_json(result).dump() << '\n';
    }
    if (opts.output_path) {
        write_file_atomic(*opts.output_path, out.str());
    } else {
        std::fputs(out.str().c_str(), stdout);
    }
}

void cmd_eval(const RunConfig& cfg, const EvalOptions& opts) {
    auto corpus = load_configured_corpus(cfg);
    if (corpus.empty()) throw EmptyCorpus(cfg.corpus);
    auto query = first_configured_query(cfg);
    auto qrels = load_configured_qrels(cfg, query.query_id);

    std::vector<EvalMode> modes = opts.modes;
    if (modes.empty()) {
        modes = {EvalMode::SAKR, EvalMode::streaming_only,
                 EvalMode::clustering_only, EvalMode::naive};
    }
    std::vector<std::size_t> k_values = opts.k_values;
    if (k_values.empty()) k_values = {cfg.top_k};

    PipelineConfig pipeline = make_pipeline_config(cfg, corpus.size());
    pipeline.with_silhouette = opts.with_silhouette;

    std::vector<MetricsReport> reports;
    nlohmann::json report_array = nlohmann::json::array();
    for (std::size_t k : k_values) {
        for (EvalMode mode : modes) {
            PipelineConfig cell = pipeline;
            cell.top_k = k;
            auto rep = run_mode(mode, corpus, qrels, query.query_id, query.text,
                                cell);
            report_array.push_back(metrics_report_to_json(rep));
            reports.push_back(std::move(rep));
        }
    }

    nlohmann::json doc;
    doc["schema"] = kMetricsSchema;
    doc["query_id"] = query.query_id;
    doc["reports"] = std::move(report_array);
    if (opts.silhouette_compare) {
        auto pair = silhouette_compare(corpus, query.text, pipeline);
        doc["silhouette_before"] = pair.before;
        doc["silhouette_after"] = pair.after;
    }

    ensure_output_dir(cfg);
    write_file_atomic(artifact_path(cfg, "metrics.json"), doc.dump(2) + "\n");
    write_file_atomic(artifact_path(cfg, "grid.csv"),
                      grid_csv(k_values, modes, reports));
}

void cmd_sweep(const RunConfig& cfg, const std::vector<std::size_t>& m_values) {
    if (m_values.empty()) throw BadConfig("sweep needs at least one m value");
    auto corpus = load_configured_corpus(cfg);
    if (corpus.empty()) throw EmptyCorpus(cfg.corpus);
    auto query = first_configured_query(cfg);
    auto qrels = load_configured_qrels(cfg, query.query_id);
    PipelineConfig pipeline = make_pipeline_config(cfg, corpus.size());

    auto rows = sweep_clusters(m_values, corpus, qrels, query.query_id,
                               query.text, pipeline);

    std::ostringstream csv;
    csv << "m,accuracy,silhouette,median_latency_us,candidates_scanned\n";
    nlohmann::json row_array = nlohmann::json::array();
    for (const auto& row : rows) {
        csv << row.m << ',' << csv_num(row.accuracy) << ',';
        if (row.silhouette) csv << csv_num(*row.silhouette);
        csv << ',' << csv_num(row.median_latency_us) << ','
            << csv_num(row.candidates_scanned) << '\n';
        nlohmann::json j = {{"m", row.m},
                            {"accuracy", row.accuracy},
                            {"median_latency_us", row.median_latency_us},
                            {"candidates_scanned", row.candidates_scanned}};
        j["silhouette"] = row.silhouette ? nlohmann::json(*row.silhouette)
                                         : nlohmann::json(nullptr);
        row_array.push_back(std::move(j));
    }
    nlohmann::json doc;
    doc["schema"] = kMetricsSchema;
    doc["sweep"] = std::move(row_array);

    ensure_output_dir(cfg);
    write_file_atomic(artifact_path(cfg, "sweep.csv"), csv.str());
    write_file_atomic(artifact_path(cfg, "sweep_metrics.json"),
                      doc.dump(2) + "\n");
}

void cmd_bench(const RunConfig& cfg, const BenchOptions& opts) {
    if (opts.sizes.empty()) throw BadConfig("bench needs at least one size");

    std::vector<BenchRow> rows;
    for (std::size_t size : opts.sizes) {
        PipelineConfig pipeline = make_pipeline_config(cfg, size);
        pipeline.capacity = size;  // bench compares at the snapshot size
        pipeline.kmeans.m = resolve_m(cfg, size);
        auto batch = bench_latency({size}, opts.n_queries, opts.spec, pipeline);
        rows.insert(rows.end(), batch.begin(), batch.end());
    }

    std::ostringstream csv;
    csv << "size,method,queries,median_latency_us,median_candidates_scanned,"
           "build_ms,cluster_ms,amortized_cluster_us_per_query\n";
    nlohmann::json row_array = nlohmann::json::array();
    for (const auto& row : rows) {
        csv << row.size << ',' << row.method << ',' << row.queries << ',';
        if (row.median_latency_us) csv << csv_num(*row.median_latency_us);
        csv << ',';
        if (row.median_candidates_scanned) {
            csv << csv_num(*row.median_candidates_scanned);
        }
        csv << ',' << csv_num(row.build_ms) << ',' << csv_num(row.cluster_ms)
            << ',';
        if (row.amortized_cluster_us_per_query) {
            csv << csv_num(*row.amortized_cluster_us_per_query);
        }
        csv << '\n';

        nlohmann::json j = {{"size", row.size},
                            {"method", row.method},
                            {"queries", row.queries},
                            {"build_ms", row.build_ms},
                            {"cluster_ms", row.cluster_ms}};
        j["median_latency_us"] =
            row.median_latency_us ? nlohmann::json(*row.median_latency_us)
                                  : nlohmann::json(nullptr);
        j["median_candidates_scanned"] =
            row.median_candidates_scanned
                ? nlohmann::json(*row.median_candidates_scanned)
                : nlohmann::json(nullptr);
        j["amortized_cluster_us_per_query"] =
            row.amortized_cluster_us_per_query
                ? nlohmann::json(*row.amortized_cluster_us_per_query)
                : nlohmann::json(nullptr);
        row_array.push_back(std::move(j));
    }
    nlohmann::json doc;
    doc["schema"] = kMetricsSchema;
    doc["bench"] = std::move(row_array);

    ensure_output_dir(cfg);
    write_file_atomic(artifact_path(cfg, "bench.csv"), csv.str());
    write_file_atomic(artifact_path(cfg, "bench.json"), doc.dump(2) + "\n");
}

}  // namespace sakr
