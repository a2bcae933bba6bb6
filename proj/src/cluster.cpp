#include "sakr/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sakr/errors.hpp"
#include "sakr/kernels.hpp"
#include "sakr/parallel.hpp"
#include "sakr/rng.hpp"

namespace sakr {

namespace {

constexpr std::size_t kAssignBlock = 1024;

// cos against a possibly non-unit centroid; a degenerate (cancelled-out)
// centroid repels everything so its cluster empties and gets repaired.
double centroid_cos(std::span<const float> point, double point_norm,
                    std::span<const float> centroid) {
    double c_sq = kernels::squared_norm(centroid.data(), centroid.size());
    if (c_sq < 1e-24) return -1.0;
    double cos = kernels::dot(point.data(), centroid.data(), point.size()) /
                 (point_norm * std::sqrt(c_sq));
    return std::clamp(cos, -1.0, 1.0);
}

double sq_dist_from_cos(double cos) { return 2.0 * (1.0 - cos); }

struct AssignResult {
    std::vector<std::size_t> labels;
    std::vector<double> sq_dist;  // to the assigned centroid
};

AssignResult assign_all(std::span<const EmbeddedDoc> points,
                        const std::vector<double>& point_norms,
                        const std::vector<std::vector<float>>& centroids) {
    AssignResult res;
    res.labels.assign(points.size(), 0);
    res.sq_dist.assign(points.size(), 0.0);
    parallel_blocks(points.size(), kAssignBlock,
                    [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) {
            double best_cos = -2.0;
            std::size_t best_j = 0;
            for (std::size_t j = 0; j < centroids.size(); ++j) {
                double cos = centroid_cos(points[i].vec, point_norms[i],
                                          centroids[j]);
                if (cos > best_cos) {  // strict: ties keep the lowest index
                    best_cos = cos;
                    best_j = j;
                }
            }
            res.labels[i] = best_j;
            res.sq_dist[i] = sq_dist_from_cos(best_cos);
        }
    });
    return res;
}

// Moves the farthest point of a size>=2 cluster into each empty cluster.
void repair_empty_clusters(std::span<const EmbeddedDoc> points,
                           std::vector<std::vector<float>>& centroids,
                           AssignResult& res) {
    const std::size_t m = centroids.size();
    std::vector<std::size_t> sizes(m, 0);
    for (std::size_t l : res.labels) ++sizes[l];
    for (std::size_t j = 0; j < m; ++j) {
        if (sizes[j] != 0) continue;
        std::size_t donor = points.size();
        double worst = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (sizes[res.labels[i]] < 2) continue;
            if (res.sq_dist[i] > worst) {
                worst = res.sq_dist[i];
                donor = i;
            }
        }
        if (donor == points.size()) break;  // unreachable when m <= n
        --sizes[res.labels[donor]];
        res.labels[donor] = j;
        res.sq_dist[donor] = 0.0;
        sizes[j] = 1;
        centroids[j] = points[donor].vec;
    }
}

std::vector<std::vector<float>> compute_means(
    std::span<const EmbeddedDoc> points, const std::vector<std::size_t>& labels,
    std::size_t m, std::size_t dim) {
    std::vector<std::vector<double>> sums(m, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(m, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        kernels::accumulate(sums[labels[i]].data(), points[i].vec.data(), dim);
        ++counts[labels[i]];
    }
    std::vector<std::vector<float>> centroids(m, std::vector<float>(dim, 0.0f));
    for (std::size_t j = 0; j < m; ++j) {
        if (counts[j] == 0) continue;
        double inv = 1.0 / static_cast<double>(counts[j]);
        for (std::size_t d = 0; d < dim; ++d) {
            centroids[j][d] = static_cast<float>(sums[j][d] * inv);
        }
    }
    return centroids;
}

double total_inertia(std::span<const EmbeddedDoc> points,
                     const std::vector<double>& point_norms,
                     const std::vector<std::size_t>& labels,
                     const std::vector<std::vector<float>>& centroids) {
    const std::size_t blocks = block_count(points.size(), kAssignBlock);
    std::vector<double> partial(blocks, 0.0);
    parallel_blocks(points.size(), kAssignBlock,
                    [&](std::size_t begin, std::size_t end, std::size_t b) {
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            acc += sq_dist_from_cos(centroid_cos(points[i].vec, point_norms[i],
                                                 centroids[labels[i]]));
        }
        partial[b] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

std::vector<std::vector<float>> seed_centroids(
    std::span<const EmbeddedDoc> points, const std::vector<double>& point_norms,
    std::size_t m, std::mt19937_64& rng) {
    std::vector<std::vector<float>> centroids;
    centroids.reserve(m);
    centroids.push_back(points[uniform_index(rng, points.size())].vec);

    std::vector<double> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        d2[i] = sq_dist_from_cos(
            centroid_cos(points[i].vec, point_norms[i], centroids[0]));
    }
    while (centroids.size() < m) {
        double total = 0.0;
        for (double w : d2) total += w;
        std::size_t pick = points.size();
        if (total > 0.0) {
            double r = uniform_double(rng) * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                cum += d2[i];
                if (d2[i] > 0.0) pick = i;
                if (cum > r && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            // All remaining points coincide with chosen centroids; take the
            // first index not yet used so exactly m seeds exist.
            std::size_t k = centroids.size();
            pick = k < points.size() ? k : 0;
        }
        centroids.push_back(points[pick].vec);
        for (std::size_t i = 0; i < points.size(); ++i) {
            d2[i] = std::min(d2[i],
                             sq_dist_from_cos(centroid_cos(
                                 points[i].vec, point_norms[i], centroids.back())));
        }
    }
    return centroids;
}

}  // namespace

double cos_distance(std::span<const float> a, std::span<const float> b) {
    return std::sqrt(2.0 * (1.0 - cos_sim(a, b)));
}

Clustering kmeans(std::span<const EmbeddedDoc> points, const KMeansConfig& cfg) {
    if (points.empty()) throw EmptyInput("kmeans needs at least one point");
    if (cfg.m == 0) throw BadConfig("cluster count must be >= 1");
    if (cfg.m > points.size()) {
        throw TooManyClusters(std::to_string(cfg.m) + " clusters for " +
                              std::to_string(points.size()) + " points");
    }
    const std::size_t dim = points.front().vec.size();
    std::unordered_set<std::string> ids;
    for (const auto& p : points) {
        if (p.vec.size() != dim) {
            throw DimMismatch("point \"" + p.doc_id + "\"");
        }
        if (!ids.insert(p.doc_id).second) {
            throw DuplicateId("point \"" + p.doc_id + "\"");
        }
    }

    std::vector<double> point_norms(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        point_norms[i] =
            std::sqrt(kernels::squared_norm(points[i].vec.data(), dim));
    }

    std::mt19937_64 rng(cfg.seed);
    auto centroids = seed_centroids(points, point_norms, cfg.m, rng);

    std::vector<std::size_t> prev_labels;
    std::vector<double> trace;
    double prev_inertia = std::numeric_limits<double>::infinity();
    double inertia = 0.0;
    std::vector<std::size_t> labels;
    // Once the relative improvement drops under tol we only keep iterating
    // to reach an assignment fixpoint, and not for long.
    constexpr std::size_t kPolishBudget = 10;
    std::size_t polish_left = kPolishBudget;
    bool polishing = false;

    const std::size_t max_iters = std::max<std::size_t>(cfg.max_iters, 1);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        AssignResult res = assign_all(points, point_norms, centroids);
        repair_empty_clusters(points, centroids, res);
        auto new_centroids = compute_means(points, res.labels, cfg.m, dim);
        inertia = total_inertia(points, point_norms, res.labels, new_centroids);
        trace.push_back(inertia);

        bool fixpoint = (res.labels == prev_labels);
        labels = std::move(res.labels);
        prev_labels = labels;
        centroids = std::move(new_centroids);

        if (fixpoint) break;
        if (polishing && --polish_left == 0) break;
        if (!polishing && iter > 0 && prev_inertia > 0.0 &&
            (prev_inertia - inertia) / prev_inertia < cfg.tol) {
            polishing = true;
        }
        prev_inertia = inertia;
    }

    Clustering out;
    out.centroids = std::move(centroids);
    out.sizes.assign(cfg.m, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.assignment[points[i].doc_id] = labels[i];
        ++out.sizes[labels[i]];
    }
    out.inertia = inertia;
    out.iteration_inertia = std::move(trace);
    return out;
}

std::size_t assign_cluster(std::span<const float> vec,
                           std::span<const std::vector<float>> centroids) {
    if (centroids.empty()) throw NoCentroids("no centroids to assign against");
    double norm = std::sqrt(kernels::squared_norm(vec.data(), vec.size()));
    if (norm < 1e-12) throw ZeroNorm("assign_cluster input");
    double best_cos = -2.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < centroids.size(); ++j) {
        if (centroids[j].size() != vec.size()) {
            throw DimMismatch("centroid " + std::to_string(j));
        }
        double cos = centroid_cos(vec, norm, centroids[j]);
        if (cos > best_cos) {
            best_cos = cos;
            best_j = j;
        }
    }
    return best_j;
}

double silhouette(std::span<const EmbeddedDoc> points,
                  const Clustering& clustering) {
    const std::size_t m = clustering.centroids.size();
    if (m < 2) throw SingleCluster("silhouette undefined for a single cluster");
    if (points.size() < 2) throw EmptyInput("silhouette needs at least 2 points");

    std::vector<std::size_t> labels(points.size());
    std::vector<std::size_t> counts(m, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto it = clustering.assignment.find(points[i].doc_id);
        if (it == clustering.assignment.end() || it->second >= m) {
            throw MismatchedClustering("point \"" + points[i].doc_id +
                                       "\" not covered by the clustering");
        }
        labels[i] = it->second;
        ++counts[labels[i]];
    }

    std::vector<double> scores(points.size(), 0.0);
    parallel_blocks(points.size(), 64,
                    [&](std::size_t begin, std::size_t end, std::size_t) {
        std::vector<double> sum_to(m);
        for (std::size_t i = begin; i < end; ++i) {
            std::fill(sum_to.begin(), sum_to.end(), 0.0);
            for (std::size_t j = 0; j < points.size(); ++j) {
                if (j == i) continue;
                sum_to[labels[j]] += cos_distance(points[i].vec, points[j].vec);
            }
            std::size_t own = labels[i];
            if (counts[own] < 2) {
                scores[i] = 0.0;  // singleton convention
                continue;
            }
            double a = sum_to[own] / static_cast<double>(counts[own] - 1);
            double b = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < m; ++c) {
                if (c == own || counts[c] == 0) continue;
                b = std::min(b, sum_to[c] / static_cast<double>(counts[c]));
            }
            double denom = std::max(a, b);
            scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
        }
    });
    double total = 0.0;
    for (double s : scores) total += s;
    return total / static_cast<double>(points.size());
}

void save_clustering(std::ostream& out, const Clustering& clustering) {
    for (std::size_t j = 0; j < clustering.centroids.size(); ++j) {
        nlohmann::json line;
        line["cluster"] = j;
        line["size"] = clustering.sizes[j];
        line["centroid"] = clustering.centroids[j];
        out << line.dump() << '\n';
    }
    nlohmann::json tail;
    tail["assignment"] = clustering.assignment;
    tail["inertia"] = clustering.inertia;
    out << tail.dump() << '\n';
}

Clustering load_clustering(std::istream& in) {
    Clustering clustering;
    std::string line;
    bool saw_tail = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded()) throw InputError("malformed clustering line");
        if (rec.contains("cluster")) {
            std::size_t j = rec["cluster"].get<std::size_t>();
            if (j != clustering.centroids.size()) {
                throw InputError("clustering centroids out of order");
            }
            clustering.centroids.push_back(
                rec["centroid"].get<std::vector<float>>());
            clustering.sizes.push_back(rec["size"].get<std::size_t>());
        } else if (rec.contains("assignment")) {
            clustering.assignment =
                rec["assignment"].get<std::map<std::string, std::size_t>>();
            clustering.inertia = rec["inertia"].get<double>();
            saw_tail = true;
        } else {
            throw InputError("unrecognized clustering line");
        }
    }
    if (!saw_tail) throw InputError("clustering file lacks an assignment block");
    return clustering;
}

}  // namespace sakr
