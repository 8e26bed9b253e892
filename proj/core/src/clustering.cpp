#include "winnow/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "winnow/merge_geometry.hpp"

namespace winnow {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kConvergenceTol = 1e-6;

double squared_distance(const Embedding& a, const Embedding& b) {
    double sum = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        sum += diff * diff;
    }
    return sum;
}

void check_vectors(const std::vector<Embedding>& vectors) {
    if (vectors.empty()) {
        throw InputError("kmeans_cluster: empty vector set");
    }
    const std::size_t dim = vectors.front().size();
    if (dim == 0) {
        throw InputError("kmeans_cluster: zero-dimensional vectors");
    }
    for (const auto& v : vectors) {
        if (v.size() != dim) {
            throw InputError("kmeans_cluster: non-uniform vector dimensions");
        }
    }
}

std::size_t count_distinct(const std::vector<Embedding>& vectors) {
    std::set<Embedding> unique(vectors.begin(), vectors.end());
    return unique.size();
}

// k-means++ seeding: subsequent centers drawn proportionally to the
// squared distance to the nearest already-chosen center.
std::vector<std::size_t> kmeanspp_init(const std::vector<Embedding>& vectors, std::size_t k,
                                       std::mt19937_64& rng) {
    const std::size_t n = vectors.size();
    std::vector<std::size_t> centers;
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centers.push_back(first(rng));

    std::vector<double> best_sq(n, std::numeric_limits<double>::infinity());
    while (centers.size() < k) {
        const Embedding& last = vectors[centers.back()];
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            best_sq[i] = std::min(best_sq[i], squared_distance(vectors[i], last));
            total += best_sq[i];
        }
        std::size_t chosen = n;
        if (total > 0.0) {
            std::uniform_real_distribution<double> dist(0.0, total);
            double u = dist(rng);
            for (std::size_t i = 0; i < n; ++i) {
                u -= best_sq[i];
                if (u <= 0.0) {
                    chosen = i;
                    break;
                }
            }
            if (chosen == n) chosen = n - 1;
        } else {
            // All mass on chosen centers (duplicate points): take the first
            // point not bitwise-equal to any chosen center.
            for (std::size_t i = 0; i < n && chosen == n; ++i) {
                bool is_center = false;
                for (auto c : centers) {
                    if (vectors[i] == vectors[c]) {
                        is_center = true;
                        break;
                    }
                }
                if (!is_center) chosen = i;
            }
        }
        centers.push_back(chosen);
    }
    return centers;
}

ClusterAssignment lloyd(const std::vector<Embedding>& vectors,
                        std::vector<Embedding> centroids) {
    const std::size_t n = vectors.size();
    const std::size_t k = centroids.size();

    ClusterAssignment result;
    result.k_effective = static_cast<int>(k);
    result.labels.assign(n, 0);

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        // Assignment step, ties to the lowest cluster index.
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_sq = squared_distance(vectors[i], centroids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double sq = squared_distance(vectors[i], centroids[c]);
                if (sq < best_sq) {
                    best = static_cast<int>(c);
                    best_sq = sq;
                }
            }
            result.labels[i] = best;
            objective += best_sq;
        }

        // Empty-cluster repair: hand the point farthest from its centroid
        // to the empty cluster.
        std::vector<std::size_t> counts(k, 0);
        for (int label : result.labels) counts[label]++;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t worst = n;
            double worst_sq = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[result.labels[i]] <= 1) continue;
                const double sq = squared_distance(vectors[i], centroids[result.labels[i]]);
                if (sq > worst_sq) {
                    worst = i;
                    worst_sq = sq;
                }
            }
            if (worst == n) break;  // nothing movable
            counts[result.labels[worst]]--;
            result.labels[worst] = static_cast<int>(c);
            counts[c] = 1;
        }

        result.objective_history.push_back(objective);
        result.iterations = iter + 1;

        // Update step.
        std::vector<Embedding> next(k, Embedding(vectors.front().size(), 0.0));
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const int c = result.labels[i];
            sizes[c]++;
            for (std::size_t d = 0; d < vectors[i].size(); ++d) next[c][d] += vectors[i][d];
        }
        double max_move = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) continue;
            for (auto& v : next[c]) v /= static_cast<double>(sizes[c]);
            max_move = std::max(max_move, std::sqrt(squared_distance(next[c], centroids[c])));
            centroids[c] = std::move(next[c]);
        }
        if (max_move < kConvergenceTol) break;
    }

    // Exact means for the final assignment.
    std::vector<Embedding> final_centroids(k, Embedding(vectors.front().size(), 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = result.labels[i];
        sizes[c]++;
        for (std::size_t d = 0; d < vectors[i].size(); ++d) {
            final_centroids[c][d] += vectors[i][d];
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (auto& v : final_centroids[c]) v /= static_cast<double>(sizes[c]);
    }
    result.centroids = std::move(final_centroids);
    return result;
}

}  // namespace

ClusterAssignment kmeans_cluster(const std::vector<Embedding>& vectors, int k,
                                 std::uint64_t seed) {
    check_vectors(vectors);
    if (k < 1) {
        throw InputError("kmeans_cluster: k must be >= 1");
    }
    const std::size_t k_eff =
        std::min<std::size_t>(static_cast<std::size_t>(k), count_distinct(vectors));

    std::mt19937_64 rng(seed);
    const auto center_indices = kmeanspp_init(vectors, k_eff, rng);
    std::vector<Embedding> centroids;
    centroids.reserve(k_eff);
    for (auto idx : center_indices) centroids.push_back(vectors[idx]);
    return lloyd(vectors, std::move(centroids));
}

ClusterAssignment kmeans_cluster_with_init(
    const std::vector<Embedding>& vectors,
    const std::vector<std::size_t>& initial_center_indices) {
    check_vectors(vectors);
    if (initial_center_indices.empty()) {
        throw InputError("kmeans_cluster_with_init: no initial centers");
    }
    std::vector<Embedding> centroids;
    centroids.reserve(initial_center_indices.size());
    for (auto idx : initial_center_indices) {
        if (idx >= vectors.size()) {
            throw InputError("kmeans_cluster_with_init: center index out of range");
        }
        centroids.push_back(vectors[idx]);
    }
    return lloyd(vectors, std::move(centroids));
}

std::vector<AgentState> assign_agents(const ClusterAssignment& assignment,
                                      const std::vector<RetrievedDocument>& docs,
                                      const std::vector<Embedding>& vectors) {
    if (assignment.labels.size() != docs.size() || docs.size() != vectors.size()) {
        throw InputError("assign_agents: labels/docs/vectors length mismatch");
    }

    std::vector<std::map<std::string, Embedding>> members(assignment.k_effective);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        members[assignment.labels[i]].emplace(docs[i].id, vectors[i]);
    }

    std::vector<AgentState> agents;
    int next_id = 1;
    for (int c = 0; c < assignment.k_effective; ++c) {
        if (members[c].empty()) continue;
        AgentState agent;
        agent.agent_id = next_id++;
        agent.cluster = make_cluster(members[c]);
        agents.push_back(std::move(agent));
    }
    return agents;
}

}  // namespace winnow
