#include "sakr/retrieve.hpp"

#include <algorithm>
#include <cmath>

#include "sakr/errors.hpp"
#include "sakr/kernels.hpp"

namespace sakr {

namespace {

using Clock = std::chrono::steady_clock;

// Candidates sort by cosine, not by the gated probability: extreme gate
// settings can saturate p_hh for distinct cosines, and the ranking must not
// depend on alpha/beta.
struct ScoredCandidate {
    std::size_t snapshot_pos;
    double cos;
};

void rank_and_emit(std::span<const IndexEntry> snapshot,
                   std::vector<ScoredCandidate>& candidates, std::size_t top_k,
                   const GateParams& params, const std::vector<std::size_t>* labels,
                   RetrievalResult& out) {
    auto better = [&](const ScoredCandidate& a, const ScoredCandidate& b) {
        if (a.cos != b.cos) return a.cos > b.cos;
        return snapshot[a.snapshot_pos].doc.doc_id <
               snapshot[b.snapshot_pos].doc.doc_id;
    };
    std::size_t keep = std::min(top_k, candidates.size());
    std::partial_sort(candidates.begin(),
                      candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), better);
    out.ranked.reserve(keep);
    for (std::size_t r = 0; r < keep; ++r) {
        const auto& c = candidates[r];
        RankedDoc doc;
        doc.doc_id = snapshot[c.snapshot_pos].doc.doc_id;
        doc.cos = c.cos;
        doc.p_hh = p_hh(c.cos, params);
        doc.cluster = labels ? static_cast<std::int64_t>((*labels)[c.snapshot_pos])
                             : -1;
        out.ranked.push_back(std::move(doc));
    }
}

}  // namespace

double p_hh(double cos, const GateParams& params) {
    if (params.alpha <= 0.0) throw BadAlpha("alpha must be > 0");
    double x = params.alpha * cos - params.beta;
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<std::size_t> select_clusters(const QueryVec& query,
                                         const Clustering& clustering,
                                         std::size_t k_probe) {
    const std::size_t m = clustering.centroids.size();
    if (k_probe == 0 || k_probe > m) {
        throw BadProbeCount("k_probe " + std::to_string(k_probe) + " for " +
                            std::to_string(m) + " clusters");
    }
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(m);
    double q_norm = std::sqrt(
        kernels::squared_norm(query.vec.data(), query.vec.size()));
    if (q_norm < 1e-12) throw ZeroNorm("select_clusters query");
    for (std::size_t j = 0; j < m; ++j) {
        double c_sq = kernels::squared_norm(clustering.centroids[j].data(),
                                            clustering.centroids[j].size());
        double cos = c_sq < 1e-24
                         ? -1.0
                         : std::clamp(kernels::dot(query.vec.data(),
                                                   clustering.centroids[j].data(),
                                                   query.vec.size()) /
                                          (q_norm * std::sqrt(c_sq)),
                                      -1.0, 1.0);
        scored.emplace_back(cos, j);
    }
    std::partial_sort(scored.begin(),
                      scored.begin() + static_cast<std::ptrdiff_t>(k_probe),
                      scored.end(), [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;
                      });
    std::vector<std::size_t> out;
    out.reserve(k_probe);
    for (std::size_t r = 0; r < k_probe; ++r) out.push_back(scored[r].second);
    return out;
}

RetrievalResult clustered_retrieve(const QueryVec& query,
                                   std::span<const IndexEntry> snapshot,
                                   const Clustering& clustering,
                                   std::size_t k_probe, std::size_t top_k,
                                   const GateParams& params) {
    if (params.alpha <= 0.0) throw BadAlpha("alpha must be > 0");
    const std::size_t m = clustering.centroids.size();
    if (clustering.assignment.size() != snapshot.size()) {
        throw MismatchedClustering(
            "clustering covers " + std::to_string(clustering.assignment.size()) +
            " docs, snapshot has " + std::to_string(snapshot.size()));
    }
    std::vector<std::size_t> labels(snapshot.size());
    std::vector<std::vector<std::size_t>> members(m);
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
        auto it = clustering.assignment.find(snapshot[i].doc.doc_id);
        if (it == clustering.assignment.end() || it->second >= m) {
            throw MismatchedClustering("snapshot doc \"" +
                                       snapshot[i].doc.doc_id +
                                       "\" not in the clustering");
        }
        labels[i] = it->second;
        members[it->second].push_back(i);
    }

    RetrievalResult out;
    out.query_id = query.query_id;
    auto started = Clock::now();

    out.clusters_probed = select_clusters(query, clustering, k_probe);

    std::vector<ScoredCandidate> candidates;
    for (std::size_t j : out.clusters_probed) {
        for (std::size_t i : members[j]) {
            candidates.push_back({i, cos_sim(query.vec, snapshot[i].doc.vec)});
        }
    }
    out.candidates_scanned = candidates.size() + m;
    rank_and_emit(snapshot, candidates, top_k, params, &labels, out);

    out.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
        Clock::now() - started);
    return out;
}

RetrievalResult naive_retrieve(const QueryVec& query,
                               std::span<const IndexEntry> snapshot,
                               std::size_t top_k, const GateParams& params) {
    if (params.alpha <= 0.0) throw BadAlpha("alpha must be > 0");
    RetrievalResult out;
    out.query_id = query.query_id;
    auto started = Clock::now();

    std::vector<ScoredCandidate> candidates;
    candidates.reserve(snapshot.size());
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
        candidates.push_back({i, cos_sim(query.vec, snapshot[i].doc.vec)});
    }
    out.candidates_scanned = snapshot.size();
    rank_and_emit(snapshot, candidates, top_k, params, nullptr, out);

    out.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
        Clock::now() - started);
    return out;
}

}  // namespace sakr
