#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "winnow/types.hpp"

namespace winnow {

// A set of documents with their embeddings and cached centroid.
// The centroid is always the arithmetic mean of the member vectors.
struct DocumentCluster {
    std::set<std::string> doc_ids;
    std::map<std::string, Embedding> vectors;
    Embedding centroid;
};

// Builds a cluster from id -> vector pairs and computes the centroid.
DocumentCluster make_cluster(const std::map<std::string, Embedding>& vectors);

// Recomputes `centroid` from `vectors`.
void recompute_centroid(DocumentCluster& cluster);

// Thresholds actually used by a merge, kept for trace output.
struct MergeThresholds {
    double t_ij = 0.0;     // ellipse
    double t_i = 0.0;      // hyperbola, retained side
    double t_j = 0.0;      // hyperbola, discarded side
};

struct MergeResult {
    std::set<std::string> kept_doc_ids;
    MergeThresholds thresholds;
};

// L2 distance. Throws InputError on dimension mismatch.
double euclidean_distance(const Embedding& a, const Embedding& b);

// Ellipse merge for agents with similar answers: keep documents whose
// summed distance to the two centroids is at most the mean summed
// distance over the union. Always keeps at least one document, and is
// symmetric in its arguments.
MergeResult ellipse_merge(const DocumentCluster& cluster_i, const DocumentCluster& cluster_j);

// Hyperbola merge of a discarded (incorrect) agent into a retained one:
// keep documents x of the union with d_discarded(x) - d_retained(x)
// strictly greater than T_discarded - T_retained, where each T is the
// mean of that distance over the union. If the strict inequality keeps
// nothing, the retained cluster is kept unchanged.
MergeResult hyperbola_merge(const DocumentCluster& retained, const DocumentCluster& discarded);

// Index of the cluster in `remaining` whose centroid is closest to
// `incorrect`'s centroid; ties break toward the lowest index.
std::size_t nearest_remaining_cluster(const DocumentCluster& incorrect,
                                      const std::vector<DocumentCluster>& remaining);

}  // namespace winnow
