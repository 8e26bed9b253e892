#pragma once

#include <cstdint>
#include <vector>

#include "winnow/agent.hpp"
#include "winnow/types.hpp"

namespace winnow {

struct ClusterAssignment {
    std::vector<int> labels;            // one per input vector, in [0, k_effective)
    std::vector<Embedding> centroids;   // length k_effective, mean of members
    int k_effective = 0;
    std::vector<double> objective_history;  // WCSS after each assignment step
    int iterations = 0;
};

// Lloyd's k-means with k-means++ initialization, deterministic given the
// seed. k is clamped to the number of distinct vectors; empty clusters are
// repaired by moving in the point farthest from its centroid.
ClusterAssignment kmeans_cluster(const std::vector<Embedding>& vectors, int k,
                                 std::uint64_t seed);

// Same iteration, but with explicit initial centers picked by index.
ClusterAssignment kmeans_cluster_with_init(const std::vector<Embedding>& vectors,
                                           const std::vector<std::size_t>& initial_center_indices);

// Partitions documents into one AgentState per nonempty cluster; agent ids
// are 1-based in cluster-label order, centroids cached from the
// assignment.
std::vector<AgentState> assign_agents(const ClusterAssignment& assignment,
                                      const std::vector<RetrievedDocument>& docs,
                                      const std::vector<Embedding>& vectors);

}  // namespace winnow
