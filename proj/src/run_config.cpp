#include "sakr/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "sakr/errors.hpp"
#include "sakr/rng.hpp"

namespace sakr {

namespace {

IndexMode parse_index_mode(const std::string& name) {
    if (name == "per_doc") return IndexMode::per_doc;
    if (name == "chunk_max") return IndexMode::chunk_max;
    throw BadConfig("unknown stream mode: " + name);
}

std::string index_mode_name(IndexMode mode) {
    return mode == IndexMode::per_doc ? "per_doc" : "chunk_max";
}

Aggregation parse_aggregation(const std::string& name) {
    if (name == "max") return Aggregation::max;
    if (name == "mean") return Aggregation::mean;
    throw BadConfig("unknown aggregation: " + name);
}

std::string aggregation_name(Aggregation agg) {
    return agg == Aggregation::max ? "max" : "mean";
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

std::size_t parse_size(const std::string& value, const std::string& key) {
    try {
        long long v = std::stoll(value);
        if (v < 0) throw BadConfig(key + " must be >= 0");
        return static_cast<std::size_t>(v);
    } catch (const BadConfig&) {
        throw;
    } catch (...) {
        throw BadConfig("cannot parse " + key + " from \"" + value + "\"");
    }
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        return std::stod(value);
    } catch (...) {
        throw BadConfig("cannot parse " + key + " from \"" + value + "\"");
    }
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw BadConfig("cannot parse " + key + " from \"" + value + "\"");
}

void validate(const RunConfig& cfg) {
    if (cfg.embedding.dim < 2) throw BadConfig("embedding.dim must be >= 2");
    if (cfg.capacity && cfg.capacity_pct) {
        throw BadConfig("set exactly one of stream.capacity / stream.capacity_pct");
    }
    if (cfg.m && cfg.m_pct) {
        throw BadConfig("set exactly one of cluster.m / cluster.m_pct");
    }
    if (cfg.chunk_size == 0) throw BadConfig("stream.chunk_size must be >= 1");
    if (cfg.gate.alpha <= 0.0) throw BadConfig("retrieve.alpha must be > 0");
    if (cfg.corpus_format != "jsonl" && cfg.corpus_format != "csv") {
        throw BadConfig("paths.corpus_format must be jsonl or csv");
    }
}

}  // namespace

CorpusFormat parse_corpus_format(const std::string& name) {
    if (name == "jsonl") return CorpusFormat::jsonl;
    if (name == "csv") return CorpusFormat::csv;
    throw BadConfig("unknown corpus format: " + name);
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    if (j.contains("embedding")) {
        const auto& e = j.at("embedding");
        cfg.embedding.dim = get_or<std::uint32_t>(e, "dim", cfg.embedding.dim);
        cfg.embedding.hash_seed =
            get_or<std::uint64_t>(e, "seed", cfg.embedding.hash_seed);
        cfg.embedding.lowercase =
            get_or<bool>(e, "lowercase", cfg.embedding.lowercase);
    }
    if (j.contains("stream")) {
        const auto& s = j.at("stream");
        if (s.contains("capacity") && !s.at("capacity").is_null()) {
            cfg.capacity = s.at("capacity").get<std::size_t>();
        }
        if (s.contains("capacity_pct") && !s.at("capacity_pct").is_null()) {
            cfg.capacity_pct = s.at("capacity_pct").get<double>();
        }
        cfg.chunk_size = get_or<std::size_t>(s, "chunk_size", cfg.chunk_size);
        cfg.index_mode = parse_index_mode(
            get_or<std::string>(s, "mode", index_mode_name(cfg.index_mode)));
        cfg.aggregation = parse_aggregation(get_or<std::string>(
            s, "aggregation", aggregation_name(cfg.aggregation)));
    }
    if (j.contains("cluster")) {
        const auto& c = j.at("cluster");
        if (c.contains("m") && !c.at("m").is_null()) {
            cfg.m = c.at("m").get<std::size_t>();
        }
        if (c.contains("m_pct") && !c.at("m_pct").is_null()) {
            cfg.m_pct = c.at("m_pct").get<double>();
        }
        cfg.kmeans_seed = get_or<std::uint64_t>(c, "seed", cfg.kmeans_seed);
        cfg.max_iters = get_or<std::size_t>(c, "max_iters", cfg.max_iters);
        cfg.tol = get_or<double>(c, "tol", cfg.tol);
    }
    if (j.contains("retrieve")) {
        const auto& r = j.at("retrieve");
        cfg.k_probe = get_or<std::size_t>(r, "k_probe", cfg.k_probe);
        cfg.top_k = get_or<std::size_t>(r, "K", cfg.top_k);
        cfg.gate.alpha = get_or<double>(r, "alpha", cfg.gate.alpha);
        cfg.gate.beta = get_or<double>(r, "beta", cfg.gate.beta);
    }
    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        cfg.corpus = get_or<std::string>(p, "corpus", cfg.corpus);
        cfg.corpus_format =
            get_or<std::string>(p, "corpus_format", cfg.corpus_format);
        cfg.qrels = get_or<std::string>(p, "qrels", cfg.qrels);
        cfg.queries = get_or<std::string>(p, "queries", cfg.queries);
        cfg.output_dir = get_or<std::string>(p, "output_dir", cfg.output_dir);
    }
    validate(cfg);
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadConfig("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw BadConfig("config file is not a JSON object: " + path);
    }
    return run_config_from_json(j);
}

void apply_override(RunConfig& cfg, const std::string& dotted_key,
                    const std::string& value) {
    const std::string& k = dotted_key;
    if (k == "embedding.dim") {
        cfg.embedding.dim = static_cast<std::uint32_t>(parse_size(value, k));
    } else if (k == "embedding.seed") {
        cfg.embedding.hash_seed = static_cast<std::uint64_t>(parse_size(value, k));
    } else if (k == "embedding.lowercase") {
        cfg.embedding.lowercase = parse_bool(value, k);
    } else if (k == "stream.capacity") {
        cfg.capacity = parse_size(value, k);
        cfg.capacity_pct.reset();
    } else if (k == "stream.capacity_pct") {
        cfg.capacity_pct = parse_double(value, k);
        cfg.capacity.reset();
    } else if (k == "stream.chunk_size") {
        cfg.chunk_size = parse_size(value, k);
    } else if (k == "stream.mode") {
        cfg.index_mode = parse_index_mode(value);
    } else if (k == "stream.aggregation") {
        cfg.aggregation = parse_aggregation(value);
    } else if (k == "cluster.m") {
        cfg.m = parse_size(value, k);
        cfg.m_pct.reset();
    } else if (k == "cluster.m_pct") {
        cfg.m_pct = parse_double(value, k);
        cfg.m.reset();
    } else if (k == "cluster.seed") {
        cfg.kmeans_seed = static_cast<std::uint64_t>(parse_size(value, k));
    } else if (k == "cluster.max_iters") {
        cfg.max_iters = parse_size(value, k);
    } else if (k == "cluster.tol") {
        cfg.tol = parse_double(value, k);
    } else if (k == "retrieve.k_probe") {
        cfg.k_probe = parse_size(value, k);
    } else if (k == "retrieve.K") {
        cfg.top_k = parse_size(value, k);
    } else if (k == "retrieve.alpha") {
        cfg.gate.alpha = parse_double(value, k);
    } else if (k == "retrieve.beta") {
        cfg.gate.beta = parse_double(value, k);
    } else if (k == "paths.corpus") {
        cfg.corpus = value;
    } else if (k == "paths.corpus_format") {
        cfg.corpus_format = value;
    } else if (k == "paths.qrels") {
        cfg.qrels = value;
    } else if (k == "paths.queries") {
        cfg.queries = value;
    } else if (k == "paths.output_dir") {
        cfg.output_dir = value;
    } else {
        throw BadConfig("unknown config key: " + dotted_key);
    }
    validate(cfg);
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["embedding"] = {{"dim", cfg.embedding.dim},
                      {"seed", cfg.embedding.hash_seed},
                      {"lowercase", cfg.embedding.lowercase}};
    j["stream"] = {{"chunk_size", cfg.chunk_size},
                   {"mode", index_mode_name(cfg.index_mode)},
                   {"aggregation", aggregation_name(cfg.aggregation)}};
    if (cfg.capacity) j["stream"]["capacity"] = *cfg.capacity;
    if (cfg.capacity_pct) j["stream"]["capacity_pct"] = *cfg.capacity_pct;
    j["cluster"] = {{"seed", cfg.kmeans_seed},
                    {"max_iters", cfg.max_iters},
                    {"tol", cfg.tol}};
    if (cfg.m) j["cluster"]["m"] = *cfg.m;
    if (cfg.m_pct) j["cluster"]["m_pct"] = *cfg.m_pct;
    j["retrieve"] = {{"k_probe", cfg.k_probe},
                     {"K", cfg.top_k},
                     {"alpha", cfg.gate.alpha},
                     {"beta", cfg.gate.beta}};
    j["paths"] = {{"corpus", cfg.corpus},
                  {"corpus_format", cfg.corpus_format},
                  {"qrels", cfg.qrels},
                  {"queries", cfg.queries},
                  {"output_dir", cfg.output_dir}};
    return j;
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = hash64(run_config_to_json(cfg).dump(), 0);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::size_t resolve_capacity(const RunConfig& cfg, std::size_t corpus_size) {
    std::size_t cap;
    if (cfg.capacity) {
        cap = *cfg.capacity;
    } else {
        double pct = cfg.capacity_pct.value_or(10.0);
        cap = static_cast<std::size_t>(
            std::llround(pct / 100.0 * static_cast<double>(corpus_size)));
    }
    if (cap == 0) throw ZeroCapacity("resolved stream capacity is 0");
    return cap;
}

std::size_t resolve_m(const RunConfig& cfg, std::size_t point_count) {
    std::size_t m;
    if (cfg.m) {
        m = *cfg.m;
    } else if (cfg.m_pct) {
        m = static_cast<std::size_t>(
            std::llround(*cfg.m_pct / 100.0 * static_cast<double>(point_count)));
    } else {
        m = 8;
    }
    return std::clamp<std::size_t>(m, 1, std::max<std::size_t>(point_count, 1));
}

PipelineConfig make_pipeline_config(const RunConfig& cfg,
                                    std::size_t corpus_size) {
    PipelineConfig p;
    p.embedding = cfg.embedding;
    p.capacity = resolve_capacity(cfg, corpus_size);
    p.chunk_size = cfg.chunk_size;
    p.index_mode = cfg.index_mode;
    p.kmeans.m = resolve_m(cfg, std::min(p.capacity, corpus_size));
    p.kmeans.seed = cfg.kmeans_seed;
    p.kmeans.max_iters = cfg.max_iters;
    p.kmeans.tol = cfg.tol;
    p.k_probe = cfg.k_probe;
    p.top_k = cfg.top_k;
    p.gate = cfg.gate;
    return p;
}

}  // namespace sakr
