#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sakr/errors.hpp"
#include "sakr/eval.hpp"
#include "test_support.hpp"

using namespace sakr;

namespace {

PipelineConfig small_pipeline(std::size_t capacity, std::size_t m) {
    PipelineConfig cfg;
    cfg.embedding.dim = 64;
    cfg.capacity = capacity;
    cfg.chunk_size = 32;
    cfg.kmeans = KMeansConfig{m, 1, 100, 1e-4};
    cfg.k_probe = 3;
    cfg.top_k = 50;
    return cfg;
}

QrelSet qrels_of(const SyntheticData& data) {
    return data.qrels.at(data.query_id);
}

}  // namespace

TEST_CASE("precision_recall_f1 reproduces the published F1 arithmetic") {
    // Rows of the K=50 comparison table: (0.720, 1.000) and (0.840, 1.000).
    // 2PR/(P+R) gives 0.83721 and 0.91304, which round to the published
    // 0.840 and 0.910.
    QrelSet qrels;
    for (int i = 0; i < 250; ++i) qrels.judged.insert("d" + std::to_string(i));

    SUBCASE("0.720 precision, full recall") {
        // 36 relevant hits out of 50 retrieved, 36 relevant total
        std::vector<std::string> retrieved;
        for (int i = 0; i < 36; ++i) {
            qrels.relevant.insert("d" + std::to_string(i));
        }
        for (int i = 0; i < 50; ++i) retrieved.push_back("d" + std::to_string(i));
        auto prf = precision_recall_f1(retrieved, qrels, 50);
        CHECK(prf.precision == doctest::Approx(0.720));
        CHECK(prf.recall == doctest::Approx(1.000));
        CHECK(prf.f1 == doctest::Approx(0.8372).epsilon(1e-4));
    }
    SUBCASE("0.840 precision, full recall") {
        std::vector<std::string> retrieved;
        for (int i = 0; i < 42; ++i) {
            qrels.relevant.insert("d" + std::to_string(i));
        }
        for (int i = 0; i < 50; ++i) retrieved.push_back("d" + std::to_string(i));
        auto prf = precision_recall_f1(retrieved, qrels, 50);
        CHECK(prf.precision == doctest::Approx(0.840));
        CHECK(prf.f1 == doctest::Approx(0.9130).epsilon(1e-4));
    }
    SUBCASE("perfect retrieval") {
        qrels.relevant = {"a", "b", "c"};
        auto prf = precision_recall_f1({"a", "b", "c"}, qrels, 3);
        CHECK(prf.precision == 1.0);
        CHECK(prf.recall == 1.0);
        CHECK(prf.f1 == 1.0);
    }
    SUBCASE("empty relevant set scores recall 1") {
        QrelSet empty;
        empty.judged = {"x"};
        auto prf = precision_recall_f1({"x"}, empty, 5);
        CHECK(prf.recall == 1.0);
        CHECK(prf.precision == 0.0);
        CHECK(prf.f1 == 0.0);
    }
    SUBCASE("nothing retrieved") {
        qrels.relevant = {"a"};
        auto prf = precision_recall_f1({}, qrels, 5);
        CHECK(prf.precision == 0.0);
        CHECK(prf.recall == 0.0);
        CHECK(prf.f1 == 0.0);
    }
    SUBCASE("f1 identity holds for random P/R pairs") {
        for (int hits = 0; hits <= 10; ++hits) {
            QrelSet q;
            for (int i = 0; i < 10; ++i) q.relevant.insert("r" + std::to_string(i));
            std::vector<std::string> retrieved;
            for (int i = 0; i < hits; ++i) retrieved.push_back("r" + std::to_string(i));
            for (int i = hits; i < 10; ++i) retrieved.push_back("x" + std::to_string(i));
            auto prf = precision_recall_f1(retrieved, q, 10);
            double pr = prf.precision + prf.recall;
            if (pr > 0) {
                CHECK(std::abs(prf.f1 -
                               2 * prf.precision * prf.recall / pr) <= 1e-9);
            } else {
                CHECK(prf.f1 == 0.0);
            }
        }
    }
}

TEST_CASE("gen_synthetic is seeded, counted, and separable") {
    SyntheticSpec spec;
    spec.corpus_size = 1000;
    spec.relevant_fraction = 0.1;
    spec.topics = 8;
    spec.noise = 0.1;
    spec.seed = 77;

    auto data = gen_synthetic(spec);
    REQUIRE(data.corpus.size() == 1000);
    CHECK(qrels_of(data).relevant.size() == 100);  // exactly size * fraction
    CHECK(qrels_of(data).judged.size() == 1000);

    SUBCASE("same seed replays identically") {
        auto again = gen_synthetic(spec);
        REQUIRE(again.corpus.size() == data.corpus.size());
        CHECK(again.query_text == data.query_text);
        for (std::size_t i = 0; i < data.corpus.size(); ++i) {
            CHECK(again.corpus[i].doc_id == data.corpus[i].doc_id);
            CHECK(again.corpus[i].combined_text == data.corpus[i].combined_text);
        }
    }
    SUBCASE("different seed produces a different stream") {
        auto other = gen_synthetic(SyntheticSpec{1000, 0.1, 8, 0.1, 78});
        bool any_diff = false;
        for (std::size_t i = 0; i < data.corpus.size(); ++i) {
            any_diff |= other.corpus[i].combined_text !=
                        data.corpus[i].combined_text;
        }
        CHECK(any_diff);
    }
    SUBCASE("relevant docs sit closer to the query than irrelevant ones") {
        EmbeddingConfig ecfg;
        ecfg.dim = 64;
        auto qvec = embed_text(data.query_text, ecfg);
        double rel_sum = 0.0, irr_sum = 0.0;
        std::size_t rel_n = 0, irr_n = 0;
        const auto& relevant = qrels_of(data).relevant;
        for (const auto& doc : data.corpus) {
            double cos = testsup::oracle_cos(
                qvec, embed_text(doc.combined_text, ecfg));
            if (relevant.contains(doc.doc_id)) {
                rel_sum += cos;
                ++rel_n;
            } else {
                irr_sum += cos;
                ++irr_n;
            }
        }
        CHECK(rel_sum / rel_n > irr_sum / irr_n);
    }
    SUBCASE("invalid specs are refused") {
        CHECK_THROWS_AS(gen_synthetic(SyntheticSpec{0, 0.1, 8, 0.1, 0}),
                        BadConfig);
        CHECK_THROWS_AS(gen_synthetic(SyntheticSpec{10, 0.0, 8, 0.1, 0}),
                        BadConfig);
        CHECK_THROWS_AS(gen_synthetic(SyntheticSpec{10, 1.0, 8, 0.1, 0}),
                        BadConfig);
        CHECK_THROWS_AS(gen_synthetic(SyntheticSpec{10, 0.5, 1, 0.1, 0}),
                        BadConfig);
        CHECK_THROWS_AS(gen_synthetic(SyntheticSpec{10, 0.5, 8, 1.0, 0}),
                        BadConfig);
    }
}

TEST_CASE("run_mode naive achieves perfect scores on separable data") {
    // Zero noise makes the topics fully separable; with K = |relevant| the
    // full scan must return exactly the relevant set (cross-checked by the
    // oracle ranking inside the retrieve suite).
    SyntheticSpec spec{400, 0.1, 6, 0.0, 91};
    auto data = gen_synthetic(spec);
    auto cfg = small_pipeline(40, 4);
    cfg.top_k = 40;
    auto rep = run_mode(EvalMode::naive, data.corpus, qrels_of(data),
                        data.query_id, data.query_text, cfg);
    CHECK(rep.precision == 1.0);
    CHECK(rep.recall == 1.0);
    CHECK(rep.f1 == 1.0);
    CHECK(rep.memory_ratio_pct == 100.0);
    CHECK(rep.candidates_scanned_mean == 400.0);
}

TEST_CASE("run_mode ablation relationships") {
    SyntheticSpec spec{600, 0.1, 8, 0.2, 92};
    auto data = gen_synthetic(spec);
    auto cfg = small_pipeline(120, 6);
    cfg.top_k = 50;

    SUBCASE("SAKR with k_probe = m equals streaming_only") {
        auto full_probe = cfg;
        full_probe.k_probe = 6;
        auto sakr = run_mode(EvalMode::SAKR, data.corpus, qrels_of(data),
                             data.query_id, data.query_text, full_probe);
        auto streaming =
            run_mode(EvalMode::streaming_only, data.corpus, qrels_of(data),
                     data.query_id, data.query_text, full_probe);
        CHECK(sakr.precision == streaming.precision);
        CHECK(sakr.recall == streaming.recall);
        CHECK(sakr.f1 == streaming.f1);
    }
    SUBCASE("memory ratio column matches the ablation table") {
        auto sakr = run_mode(EvalMode::SAKR, data.corpus, qrels_of(data),
                             data.query_id, data.query_text, cfg);
        auto clustering_only =
            run_mode(EvalMode::clustering_only, data.corpus, qrels_of(data),
                     data.query_id, data.query_text, cfg);
        CHECK(sakr.memory_ratio_pct == doctest::Approx(20.0));
        CHECK(clustering_only.memory_ratio_pct == 100.0);
        CHECK(sakr.table_label == "SAKR");
        CHECK(clustering_only.table_label == "SAKR-streaming");
        CHECK(sakr.retained == 120);
        CHECK(clustering_only.retained == 600);
    }
    SUBCASE("reports are deterministic apart from latency") {
        auto a = run_mode(EvalMode::SAKR, data.corpus, qrels_of(data),
                          data.query_id, data.query_text, cfg);
        auto b = run_mode(EvalMode::SAKR, data.corpus, qrels_of(data),
                          data.query_id, data.query_text, cfg);
        CHECK(a.precision == b.precision);
        CHECK(a.recall == b.recall);
        CHECK(a.f1 == b.f1);
        CHECK(a.candidates_scanned_mean == b.candidates_scanned_mean);
        CHECK(a.memory_ratio_pct == b.memory_ratio_pct);
    }
}

TEST_CASE("sweep_clusters degenerates to streaming_only at m = 1") {
    SyntheticSpec spec{500, 0.1, 8, 0.2, 93};
    auto data = gen_synthetic(spec);
    auto cfg = small_pipeline(100, 1);
    cfg.top_k = 50;

    auto rows = sweep_clusters({1, 4, 8}, data.corpus, qrels_of(data),
                               data.query_id, data.query_text, cfg);
    REQUIRE(rows.size() == 3);
    auto streaming = run_mode(EvalMode::streaming_only, data.corpus,
                              qrels_of(data), data.query_id, data.query_text,
                              cfg);
    CHECK(rows[0].m == 1);
    CHECK(rows[0].accuracy == streaming.precision);
    CHECK(!rows[0].silhouette.has_value());
    CHECK(rows[1].silhouette.has_value());

    // all clusters probed at m = 1: capacity + the single centroid
    CHECK(rows[0].candidates_scanned == 101.0);
}

TEST_CASE("silhouette_compare with full retention is an exact tie") {
    SyntheticSpec spec{120, 0.2, 5, 0.2, 94};
    auto data = gen_synthetic(spec);
    auto cfg = small_pipeline(120, 3);  // capacity = corpus size
    auto pair = silhouette_compare(data.corpus, data.query_text, cfg);
    CHECK(pair.before == pair.after);
}

TEST_CASE("silhouette_compare improves on a tight-topic corpus") {
    // One compact relevant topic among wide noisy ones; retaining the
    // query-similar fifth sharpens the cluster structure.
    SyntheticSpec spec{800, 0.1, 12, 0.3, 95};
    auto data = gen_synthetic(spec);
    auto cfg = small_pipeline(160, 2);
    auto pair = silhouette_compare(data.corpus, data.query_text, cfg);
    CHECK(pair.after > pair.before);
}

TEST_CASE("bench_latency reports medians and build costs per size") {
    SyntheticSpec spec{0, 0.05, 10, 0.1, 96};
    auto cfg = small_pipeline(1, 8);
    cfg.k_probe = 2;
    cfg.top_k = 10;

    auto rows = bench_latency({300, 600}, 9, spec, cfg);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < rows.size(); i += 2) {
        CHECK(rows[i].method == "clustered");
        CHECK(rows[i + 1].method == "naive");
        CHECK(rows[i].size == rows[i + 1].size);
        REQUIRE(rows[i].median_candidates_scanned.has_value());
        REQUIRE(rows[i + 1].median_candidates_scanned.has_value());
        // k_probe < m: strictly less work than the full scan
        CHECK(*rows[i].median_candidates_scanned <
              *rows[i + 1].median_candidates_scanned);
        CHECK(*rows[i + 1].median_candidates_scanned ==
              static_cast<double>(rows[i].size));
        CHECK(rows[i].cluster_ms > 0.0);
        CHECK(rows[i].amortized_cluster_us_per_query.has_value());
    }

    SUBCASE("zero queries leaves only build costs") {
        auto empty = bench_latency({200}, 0, spec, cfg);
        REQUIRE(empty.size() == 2);
        CHECK(!empty[0].median_latency_us.has_value());
        CHECK(!empty[0].median_candidates_scanned.has_value());
        CHECK(empty[0].build_ms >= 0.0);
        CHECK(empty[0].queries == 0);
    }
}
