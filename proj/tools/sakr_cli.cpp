// sakr: bounded-memory streaming retrieval over a similarity-filtered index.
//
//   sakr gen    --size 16000 --out data            synthetic labeled corpus
//   sakr build  --config run.json                  stream-filter + cluster
//   sakr query  --config run.json --text "..."     top-K contexts
//   sakr eval   --config run.json                  Table-style metrics
//   sakr sweep  --config run.json --m-values 4,8   accuracy vs cluster count
//   sakr bench  --config run.json --sizes 1000     clustered vs full scan
//
// Exit codes: 0 success, 1 internal error, 2 usage/input error.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sakr/commands.hpp"
#include "sakr/errors.hpp"
#include "sakr/run_config.hpp"

namespace {

std::vector<std::size_t> parse_size_list(const std::string& csv) {
    std::vector<std::size_t> out;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        out.push_back(static_cast<std::size_t>(std::stoull(cur)));
        cur.clear();
    };
    for (char c : csv) {
        if (c == ',') {
            flush();
        } else if (c != ' ') {
            cur += c;
        }
    }
    flush();
    return out;
}

struct ConfigArgs {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("--config", args.config_path, "run config JSON file");
    cmd->add_option("--set", args.overrides,
                    "dotted-key override, e.g. --set retrieve.K=50")
        ->take_all();
    // The common knobs also exist as dotted flags.
    static const char* keys[] = {
        "embedding.dim",   "embedding.seed",    "embedding.lowercase",
        "stream.capacity", "stream.capacity_pct", "stream.chunk_size",
        "stream.mode",     "stream.aggregation", "cluster.m",
        "cluster.m_pct",   "cluster.seed",      "cluster.max_iters",
        "cluster.tol",     "retrieve.k_probe",  "retrieve.K",
        "retrieve.alpha",  "retrieve.beta",     "paths.corpus",
        "paths.corpus_format", "paths.qrels",   "paths.queries",
        "paths.output_dir"};
    for (const char* key : keys) {
        cmd->add_option_function<std::string>(
            std::string("--") + key,
            [&args, key](const std::string& value) {
                args.overrides.push_back(std::string(key) + "=" + value);
            },
            "override config key " + std::string(key));
    }
}

sakr::RunConfig resolve_config(const ConfigArgs& args) {
    sakr::RunConfig cfg;
    if (!args.config_path.empty()) {
        cfg = sakr::load_run_config(args.config_path);
    }
    for (const auto& kv : args.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw sakr::BadConfig("override must look like key=value: " + kv);
        }
        sakr::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming similarity index + clustered retrieval"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic labeled corpus");
    sakr::GenOptions gen_opts;
    gen->add_option("--size", gen_opts.spec.corpus_size, "corpus size")
        ->default_val(gen_opts.spec.corpus_size);
    gen->add_option("--relevant-fraction", gen_opts.spec.relevant_fraction,
                    "fraction of relevant docs")
        ->default_val(gen_opts.spec.relevant_fraction);
    gen->add_option("--topics", gen_opts.spec.topics, "topic count (>= 2)")
        ->default_val(gen_opts.spec.topics);
    gen->add_option("--noise", gen_opts.spec.noise, "noise token fraction")
        ->default_val(gen_opts.spec.noise);
    gen->add_option("--seed", gen_opts.spec.seed, "generator seed")
        ->default_val(gen_opts.spec.seed);
    gen->add_option("--queries", gen_opts.query_count, "queries to emit")
        ->default_val(gen_opts.query_count);
    gen->add_option("--out", gen_opts.out_dir, "output directory")
        ->default_val(gen_opts.out_dir);

    // build
    auto* build = app.add_subcommand("build", "build the index and clustering");
    ConfigArgs build_cfg;
    add_config_options(build, build_cfg);

    // query
    auto* query = app.add_subcommand("query", "answer queries from artifacts");
    ConfigArgs query_cfg;
    add_config_options(query, query_cfg);
    sakr::QueryOptions query_opts;
    std::string query_text;
    std::string query_out;
    query->add_option("--text", query_text, "inline query text");
    query->add_flag("--naive", query_opts.naive, "full-scan baseline");
    query->add_option("-o,--output", query_out, "result JSONL file (default stdout)");

    // eval
    auto* eval = app.add_subcommand("eval", "run the evaluation modes");
    ConfigArgs eval_cfg;
    add_config_options(eval, eval_cfg);
    std::string eval_modes_csv;
    std::string eval_k_csv;
    sakr::EvalOptions eval_opts;
    eval->add_option("--modes", eval_modes_csv,
                     "comma list of SAKR,streaming_only,clustering_only,naive");
    eval->add_option("--k-values", eval_k_csv, "comma list of K values");
    eval->add_flag("--silhouette", eval_opts.with_silhouette,
                   "score clustered modes with silhouette (quadratic)");
    eval->add_flag("--silhouette-compare", eval_opts.silhouette_compare,
                   "add the before/after streaming silhouette pair");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "accuracy vs cluster count");
    ConfigArgs sweep_cfg;
    add_config_options(sweep, sweep_cfg);
    std::string sweep_m_csv;
    sweep->add_option("--m-values", sweep_m_csv, "comma list of cluster counts")
        ->required();

    // bench
    auto* bench = app.add_subcommand("bench", "clustered vs naive latency");
    ConfigArgs bench_cfg;
    add_config_options(bench, bench_cfg);
    sakr::BenchOptions bench_opts;
    std::string bench_sizes_csv;
    bench->add_option("--sizes", bench_sizes_csv, "comma list of snapshot sizes")
        ->required();
    bench->add_option("-n,--queries-n", bench_opts.n_queries,
                      "queries per size")
        ->default_val(bench_opts.n_queries);
    bench->add_option("--topics", bench_opts.spec.topics, "synthetic topics")
        ->default_val(std::size_t{100});
    bench->add_option("--relevant-fraction", bench_opts.spec.relevant_fraction,
                      "synthetic relevant fraction")
        ->default_val(0.01);
    bench->add_option("--noise", bench_opts.spec.noise, "synthetic noise")
        ->default_val(bench_opts.spec.noise);
    bench->add_option("--seed", bench_opts.spec.seed, "synthetic seed")
        ->default_val(bench_opts.spec.seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            sakr::cmd_gen(gen_opts);
        } else if (build->parsed()) {
            sakr::cmd_build(resolve_config(build_cfg));
        } else if (query->parsed()) {
            if (!query_text.empty()) query_opts.text = query_text;
            if (!query_out.empty()) query_opts.output_path = query_out;
            sakr::cmd_query(resolve_config(query_cfg), query_opts);
        } else if (eval->parsed()) {
            for (std::size_t k : parse_size_list(eval_k_csv)) {
                eval_opts.k_values.push_back(k);
            }
            if (!eval_modes_csv.empty()) {
                std::string cur;
                for (char c : eval_modes_csv + ",") {
                    if (c == ',') {
                        if (!cur.empty()) eval_opts.modes.push_back(sakr::parse_mode(cur));
                        cur.clear();
                    } else if (c != ' ') {
                        cur += c;
                    }
                }
            }
            sakr::cmd_eval(resolve_config(eval_cfg), eval_opts);
        } else if (sweep->parsed()) {
            sakr::cmd_sweep(resolve_config(sweep_cfg),
                            parse_size_list(sweep_m_csv));
        } else if (bench->parsed()) {
            bench_opts.sizes = parse_size_list(bench_sizes_csv);
            sakr::cmd_bench(resolve_config(bench_cfg), bench_opts);
        }
    } catch (const sakr::InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 0;
}
