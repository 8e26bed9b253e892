#include "winnow/merge_geometry.hpp"

#include <cmath>

namespace winnow {

namespace {

Embedding mean_of(const std::map<std::string, Embedding>& vectors) {
    Embedding mean(vectors.begin()->second.size(), 0.0);
    for (const auto& [id, vec] : vectors) {
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += vec[d];
    }
    for (auto& v : mean) v /= static_cast<double>(vectors.size());
    return mean;
}

void check_merge_inputs(const DocumentCluster& a, const DocumentCluster& b) {
    if (a.vectors.empty() || b.vectors.empty()) {
        throw InputError("merge: empty cluster");
    }
    if (a.centroid.size() != b.centroid.size()) {
        throw InputError("merge: dimension mismatch between clusters");
    }
}

}  // namespace

DocumentCluster make_cluster(const std::map<std::string, Embedding>& vectors) {
    if (vectors.empty()) {
        throw InputError("make_cluster: no vectors");
    }
    DocumentCluster cluster;
    cluster.vectors = vectors;
    for (const auto& [id, vec] : vectors) cluster.doc_ids.insert(id);
    cluster.centroid = mean_of(cluster.vectors);
    return cluster;
}

void recompute_centroid(DocumentCluster& cluster) {
    if (cluster.vectors.empty()) {
        throw InputError("recompute_centroid: empty cluster");
    }
    cluster.centroid = mean_of(cluster.vectors);
}

double euclidean_distance(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size()) {
        throw InputError("euclidean_distance: dimension mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
    }
    double sum = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

MergeResult ellipse_merge(const DocumentCluster& cluster_i, const DocumentCluster& cluster_j) {
    check_merge_inputs(cluster_i, cluster_j);

    // Summed distance of every union member to both centroids; the
    // threshold is the mean over the union, so the minimum always passes.
    std::map<std::string, double> summed;
    double total = 0.0;
    for (const auto* cluster : {&cluster_i, &cluster_j}) {
        for (const auto& [id, vec] : cluster->vectors) {
            const double s = euclidean_distance(vec, cluster_i.centroid) +
                             euclidean_distance(vec, cluster_j.centroid);
            summed[id] = s;
            total += s;
        }
    }
    const double threshold = total / static_cast<double>(summed.size());

    MergeResult result;
    result.thresholds.t_ij = threshold;
    for (const auto& [id, s] : summed) {
        if (s <= threshold) result.kept_doc_ids.insert(id);
    }
    return result;
}

MergeResult hyperbola_merge(const DocumentCluster& retained, const DocumentCluster& discarded) {
    check_merge_inputs(retained, discarded);

    std::map<std::string, double> to_retained;
    std::map<std::string, double> to_discarded;
    double sum_i = 0.0;
    double sum_j = 0.0;
    for (const auto* cluster : {&retained, &discarded}) {
        for (const auto& [id, vec] : cluster->vectors) {
            const double di = euclidean_distance(vec, retained.centroid);
            const double dj = euclidean_distance(vec, discarded.centroid);
            to_retained[id] = di;
            to_discarded[id] = dj;
            sum_i += di;
            sum_j += dj;
        }
    }
    const double n = static_cast<double>(to_retained.size());
    const double t_i = sum_i / n;
    const double t_j = sum_j / n;

    MergeResult result;
    result.thresholds.t_i = t_i;
    result.thresholds.t_j = t_j;
    for (const auto& [id, di] : to_retained) {
        if (to_discarded[id] - di > t_j - t_i) result.kept_doc_ids.insert(id);
    }
    // The strict inequality can keep nothing (e.g. identical clusters);
    // the retained agent then keeps its own documents.
    if (result.kept_doc_ids.empty()) {
        result.kept_doc_ids = retained.doc_ids;
    }
    return result;
}

std::size_t nearest_remaining_cluster(const DocumentCluster& incorrect,
                                      const std::vector<DocumentCluster>& remaining) {
    if (remaining.empty()) {
        throw InputError("nearest_remaining_cluster: no remaining clusters");
    }
    std::size_t best = 0;
    double best_dist = euclidean_distance(incorrect.centroid, remaining[0].centroid);
    for (std::size_t i = 1; i < remaining.size(); ++i) {
        const double d = euclidean_distance(incorrect.centroid, remaining[i].centroid);
        if (d < best_dist) {
            best = i;
            best_dist = d;
        }
    }
    return best;
}

}  // namespace winnow
