#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sakr/eval.hpp"
#include "sakr/run_config.hpp"

namespace sakr {

// Subcommand bodies, shared by the CLI binary and the integration tests.
// They throw; the CLI maps InputError to exit 2 and anything else to 1.

struct GenOptions {
    SyntheticSpec spec;
    std::size_t query_count = 1;
    std::string out_dir = "data";
};

// Writes corpus.jsonl, qrels.tsv, queries.jsonl.
void cmd_gen(const GenOptions& opts);

// Streams the corpus into the index, clusters the snapshot, and writes
// index.sakv, clustering.jsonl, manifest.json to the output dir.
void cmd_build(const RunConfig& cfg);

struct QueryOptions {
    std::optional<std::string> text;  // one inline query, id "q0"
    bool naive = false;
    std::optional<std::string> output_path;  // default stdout
};

void cmd_query(const RunConfig& cfg, const QueryOptions& opts);

struct EvalOptions {
    std::vector<EvalMode> modes;         // default: all four
    std::vector<std::size_t> k_values;   // default: {config K}
    bool with_silhouette = false;
    bool silhouette_compare = false;  // adds the before/after pair
};

// metrics.json (one object per mode x K cell) + grid.csv.
void cmd_eval(const RunConfig& cfg, const EvalOptions& opts);

// sweep.csv + sweep_metrics.json, one SAKR run per m.
void cmd_sweep(const RunConfig& cfg, const std::vector<std::size_t>& m_values);

struct BenchOptions {
    std::vector<std::size_t> sizes;
    std::size_t n_queries = 100;
    SyntheticSpec spec;  // corpus_size replaced per size
};

// bench.csv + bench.json over synthetic snapshots.
void cmd_bench(const RunConfig& cfg, const BenchOptions& opts);

// Helpers reused by tests.
nlohmann::json metrics_report_to_json(const MetricsReport& rep);
nlohmann::json retrieval_result_to_json(const RetrievalResult& result);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace sakr
