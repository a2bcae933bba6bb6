#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sakr/embed.hpp"
#include "sakr/eval.hpp"
#include "sakr/hhindex.hpp"

namespace sakr {

// One config object drives every command; the CLI applies flat dotted-key
// overrides on top of the JSON file. Exactly one of capacity/capacity_pct
// and one of m/m_pct may be set; the _pct forms resolve against the corpus
// and the clustered point set respectively.
struct RunConfig {
    // embedding.*
    EmbeddingConfig embedding;

    // stream.*
    std::optional<std::size_t> capacity;
    std::optional<double> capacity_pct;
    std::size_t chunk_size = 64;
    IndexMode index_mode = IndexMode::per_doc;
    Aggregation aggregation = Aggregation::max;  // multi-query profiles

    // cluster.*
    std::optional<std::size_t> m;
    std::optional<double> m_pct;
    std::uint64_t kmeans_seed = 0;
    std::size_t max_iters = 100;
    double tol = 1e-4;

    // retrieve.*
    std::size_t k_probe = 3;
    std::size_t top_k = 50;
    GateParams gate;

    // paths.*
    std::string corpus;
    std::string corpus_format = "jsonl";  // jsonl | csv
    std::string qrels;
    std::string queries;
    std::string output_dir = "out";
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// `--retrieve.K 50` style override. Throws BadConfig for unknown keys or
// unparseable values.
void apply_override(RunConfig& cfg, const std::string& dotted_key,
                    const std::string& value);

// Canonical form: defaults filled in, optionals emitted only when set.
// Hashing this proves a run reproducible from (config, inputs).
nlohmann::json run_config_to_json(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

std::size_t resolve_capacity(const RunConfig& cfg, std::size_t corpus_size);
std::size_t resolve_m(const RunConfig& cfg, std::size_t point_count);

// Absolute pipeline parameters for one corpus.
PipelineConfig make_pipeline_config(const RunConfig& cfg,
                                    std::size_t corpus_size);

CorpusFormat parse_corpus_format(const std::string& name);

}  // namespace sakr
