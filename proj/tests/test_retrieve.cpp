#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "sakr/errors.hpp"
#include "sakr/retrieve.hpp"
#include "test_support.hpp"

using namespace sakr;

namespace {

// Snapshot of random unit docs plus a clustering over them.
struct Fixture {
    std::vector<IndexEntry> snapshot;
    Clustering clustering;
};

Fixture make_fixture(std::size_t n, std::size_t m, std::uint64_t seed,
                     std::size_t dim = 16) {
    std::mt19937_64 rng(seed);
    Fixture f;
    std::vector<EmbeddedDoc> docs;
    for (std::size_t i = 0; i < n; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "d%05zu", i);
        docs.push_back({buf, testsup::random_unit_vec(rng, dim)});
        f.snapshot.push_back({docs.back(), 0.0, i});
    }
    f.clustering = kmeans(docs, KMeansConfig{m, seed, 100, 1e-4});
    return f;
}

std::vector<std::string> ids_of(const RetrievalResult& r) {
    std::vector<std::string> ids;
    for (const auto& d : r.ranked) ids.push_back(d.doc_id);
    return ids;
}

// Independent ranking: plain-double cosine, full stable sort.
std::vector<std::string> oracle_rank(const QueryVec& q,
                                     const std::vector<IndexEntry>& snapshot,
                                     std::size_t top_k) {
    std::vector<std::pair<std::string, double>> scored;
    for (const auto& e : snapshot) {
        scored.emplace_back(e.doc.doc_id,
                            testsup::oracle_cos(q.vec, e.doc.vec));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < std::min(top_k, scored.size()); ++i) {
        ids.push_back(scored[i].first);
    }
    return ids;
}

}  // namespace

TEST_CASE("p_hh evaluates the sigmoid gate") {
    // cos = beta/alpha sits at the sigmoid midpoint
    CHECK(p_hh(0.5, GateParams{10.0, 5.0}) == doctest::Approx(0.5));
    // direct evaluation of 1/(1+e^-1) and its mirror
    CHECK(p_hh(1.0, GateParams{1.0, 0.0}) ==
          doctest::Approx(0.73106).epsilon(1e-5));
    CHECK(p_hh(-1.0, GateParams{1.0, 0.0}) ==
          doctest::Approx(0.26894).epsilon(1e-5));
    CHECK_THROWS_AS(p_hh(0.5, GateParams{0.0, 0.0}), BadAlpha);
    CHECK_THROWS_AS(p_hh(0.5, GateParams{-2.0, 0.0}), BadAlpha);

    SUBCASE("strictly monotone in cos for any alpha > 0") {
        // The sigmoid rounds to exactly 1.0 in double once its argument
        // passes ~37, so strictness is observable only below saturation;
        // ranking therefore sorts by cos, never by p_hh.
        std::mt19937_64 rng(41);
        for (int trial = 0; trial < 200; ++trial) {
            GateParams params{1e-3 + 25.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53),
                              -6.0 + 12.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53)};
            double c1 = -1.0 + 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
            double c2 = -1.0 + 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
            if (std::abs(c1 - c2) < 1e-9) continue;
            if (c1 < c2) std::swap(c1, c2);
            CHECK(p_hh(c1, params) > p_hh(c2, params));
        }
    }
    SUBCASE("output stays in (0, 1) at extreme settings") {
        CHECK(p_hh(1.0, GateParams{100.0, -3.0}) < 1.0 + 1e-12);
        CHECK(p_hh(1.0, GateParams{100.0, -3.0}) > 0.0);
        CHECK(p_hh(-1.0, GateParams{100.0, 3.0}) > 0.0);
    }
}

TEST_CASE("select_clusters ranks centroids by query similarity") {
    SUBCASE("single cluster") {
        Clustering one;
        one.centroids = {testsup::basis_vec(4, 0)};
        QueryVec q{"q", testsup::basis_vec(4, 1)};
        CHECK(select_clusters(q, one, 1) == std::vector<std::size_t>{0});
        CHECK_THROWS_AS(select_clusters(q, one, 0), BadProbeCount);
        CHECK_THROWS_AS(select_clusters(q, one, 2), BadProbeCount);
    }
    SUBCASE("query matching one orthogonal centroid ranks it first") {
        Clustering four;
        for (std::size_t j = 0; j < 4; ++j) {
            four.centroids.push_back(testsup::basis_vec(4, j));
        }
        QueryVec q{"q", testsup::basis_vec(4, 3)};
        CHECK(select_clusters(q, four, 1) == std::vector<std::size_t>{3});
    }
    SUBCASE("k_probe = m returns a full permutation sorted by similarity") {
        std::mt19937_64 rng(42);
        Clustering c;
        for (std::size_t j = 0; j < 6; ++j) {
            c.centroids.push_back(testsup::random_unit_vec(rng, 8));
        }
        QueryVec q{"q", testsup::random_unit_vec(rng, 8)};
        auto order = select_clusters(q, c, 6);
        REQUIRE(order.size() == 6);
        // full sort oracle
        std::vector<std::pair<double, std::size_t>> scored;
        for (std::size_t j = 0; j < 6; ++j) {
            scored.emplace_back(testsup::oracle_cos(q.vec, c.centroids[j]), j);
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t r = 0; r < 6; ++r) CHECK(order[r] == scored[r].second);
    }
}

TEST_CASE("naive_retrieve matches the full sort oracle") {
    std::mt19937_64 rng(43);
    auto f = make_fixture(500, 10, 44);
    QueryVec q{"q", testsup::random_unit_vec(rng, 16)};
    auto result = naive_retrieve(q, f.snapshot, 20, GateParams{});
    CHECK(result.candidates_scanned == 500);
    CHECK(ids_of(result) == oracle_rank(q, f.snapshot, 20));

    SUBCASE("single doc") {
        std::vector<IndexEntry> one{f.snapshot[0]};
        auto r = naive_retrieve(q, one, 1, GateParams{});
        REQUIRE(r.ranked.size() == 1);
        CHECK(r.ranked[0].doc_id == f.snapshot[0].doc.doc_id);
        CHECK(r.ranked[0].cluster == -1);
    }
    SUBCASE("K = 0 returns an empty ranking") {
        auto r = naive_retrieve(q, f.snapshot, 0, GateParams{});
        CHECK(r.ranked.empty());
        CHECK(r.candidates_scanned == 500);
    }
    SUBCASE("empty snapshot") {
        auto r = naive_retrieve(q, {}, 5, GateParams{});
        CHECK(r.ranked.empty());
        CHECK(r.candidates_scanned == 0);
    }
}

TEST_CASE("clustered_retrieve scans only the probed clusters") {
    std::mt19937_64 rng(45);
    auto f = make_fixture(100, 10, 46);
    QueryVec q{"q", testsup::random_unit_vec(rng, 16)};

    auto result = clustered_retrieve(q, f.snapshot, f.clustering, 2, 5,
                                     GateParams{});
    CHECK(result.clusters_probed.size() == 2);

    // brute-force oracle restricted to the probed clusters' members
    std::vector<IndexEntry> probed_docs;
    for (const auto& e : f.snapshot) {
        std::size_t label = f.clustering.assignment.at(e.doc.doc_id);
        if (label == result.clusters_probed[0] ||
            label == result.clusters_probed[1]) {
            probed_docs.push_back(e);
        }
    }
    CHECK(result.candidates_scanned == probed_docs.size() + 10);
    CHECK(ids_of(result) == oracle_rank(q, probed_docs, 5));

    SUBCASE("m = 1 probing everything equals the naive scan") {
        auto one = kmeans(
            [&] {
                std::vector<EmbeddedDoc> docs;
                for (const auto& e : f.snapshot) docs.push_back(e.doc);
                return docs;
            }(),
            KMeansConfig{1, 0, 100, 1e-4});
        auto clustered =
            clustered_retrieve(q, f.snapshot, one, 1, 7, GateParams{});
        auto naive = naive_retrieve(q, f.snapshot, 7, GateParams{});
        CHECK(ids_of(clustered) == ids_of(naive));
    }
    SUBCASE("K larger than the candidate pool returns everything sorted") {
        auto r = clustered_retrieve(q, f.snapshot, f.clustering, 1, 1000,
                                    GateParams{});
        CHECK(r.ranked.size() + 10 == r.candidates_scanned);
        for (std::size_t i = 1; i < r.ranked.size(); ++i) {
            CHECK(r.ranked[i - 1].cos >= r.ranked[i].cos);
        }
    }
    SUBCASE("clustering over a different doc set is refused") {
        auto other = make_fixture(60, 4, 47);
        CHECK_THROWS_AS(clustered_retrieve(q, f.snapshot, other.clustering, 2,
                                           5, GateParams{}),
                        MismatchedClustering);
    }
}

TEST_CASE("ranked order is invariant to the gate parameters") {
    std::mt19937_64 rng(48);
    auto f = make_fixture(200, 8, 49);
    const GateParams settings[] = {{1.0, 0.0}, {10.0, 5.0}, {100.0, -3.0}};
    for (int trial = 0; trial < 20; ++trial) {
        QueryVec q{"q", testsup::random_unit_vec(rng, 16)};
        auto reference =
            clustered_retrieve(q, f.snapshot, f.clustering, 3, 25, settings[0]);
        for (const auto& params : {settings[1], settings[2]}) {
            auto other =
                clustered_retrieve(q, f.snapshot, f.clustering, 3, 25, params);
            CHECK(ids_of(other) == ids_of(reference));
        }
        auto naive_ref = naive_retrieve(q, f.snapshot, 25, settings[0]);
        for (const auto& params : {settings[1], settings[2]}) {
            CHECK(ids_of(naive_retrieve(q, f.snapshot, 25, params)) ==
                  ids_of(naive_ref));
        }
    }
}

TEST_CASE("probing all clusters recovers the naive top-K") {
    std::mt19937_64 rng(50);
    for (int trial = 0; trial < 5; ++trial) {
        std::size_t m = 2 + rng() % 8;
        auto f = make_fixture(80 + rng() % 120, m, rng());
        QueryVec q{"q", testsup::random_unit_vec(rng, 16)};
        std::size_t top_k = 1 + rng() % 30;
        auto clustered = clustered_retrieve(q, f.snapshot, f.clustering, m,
                                            top_k, GateParams{});
        auto naive = naive_retrieve(q, f.snapshot, top_k, GateParams{});
        CHECK(ids_of(clustered) == ids_of(naive));
    }
}

TEST_CASE("work bound: fewer candidates than the full scan when k_probe < m") {
    std::mt19937_64 rng(51);
    auto f = make_fixture(400, 10, 52);
    for (int trial = 0; trial < 10; ++trial) {
        QueryVec q{"q", testsup::random_unit_vec(rng, 16)};
        auto r = clustered_retrieve(q, f.snapshot, f.clustering, 3, 10,
                                    GateParams{});
        CHECK(r.candidates_scanned < 400);
    }
}

TEST_CASE("retrieval is deterministic apart from elapsed") {
    std::mt19937_64 rng(53);
    auto f = make_fixture(150, 6, 54);
    QueryVec q{"q", testsup::random_unit_vec(rng, 16)};
    auto a = clustered_retrieve(q, f.snapshot, f.clustering, 2, 30, GateParams{});
    auto b = clustered_retrieve(q, f.snapshot, f.clustering, 2, 30, GateParams{});
    CHECK(ids_of(a) == ids_of(b));
    CHECK(a.candidates_scanned == b.candidates_scanned);
    CHECK(a.clusters_probed == b.clusters_probed);
    for (std::size_t i = 0; i < a.ranked.size(); ++i) {
        CHECK(a.ranked[i].cos == b.ranked[i].cos);
        CHECK(a.ranked[i].p_hh == b.ranked[i].p_hh);
        CHECK(a.ranked[i].cluster == b.ranked[i].cluster);
    }
}
