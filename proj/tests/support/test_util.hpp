#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "winnow/llm_backend.hpp"
#include "winnow/merge_geometry.hpp"

namespace winnow::test {

inline std::vector<Embedding> random_vectors(std::size_t n, std::size_t dim,
                                             std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    std::vector<Embedding> vectors(n, Embedding(dim));
    for (auto& v : vectors) {
        for (auto& x : v) x = dist(rng);
    }
    return vectors;
}

inline DocumentCluster cluster_from(const std::vector<Embedding>& vectors,
                                    const std::string& prefix) {
    std::map<std::string, Embedding> members;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        members[prefix + std::to_string(i)] = vectors[i];
    }
    return make_cluster(members);
}

// Chat backend driven by a function of the request; records every request.
// Safe for concurrent use.
class FunctionBackend : public ChatBackend {
public:
    explicit FunctionBackend(std::function<std::string(const ChatRequest&)> fn)
        : fn_(std::move(fn)) {}

    ChatResponse complete(const ChatRequest& request) override {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            requests_.push_back(request);
        }
        ChatResponse response;
        response.text = fn_(request);
        return response;
    }

    std::vector<ChatRequest> requests() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return requests_;
    }

private:
    std::function<std::string(const ChatRequest&)> fn_;
    mutable std::mutex mutex_;
    mutable std::vector<ChatRequest> requests_;
};

}  // namespace winnow::test
