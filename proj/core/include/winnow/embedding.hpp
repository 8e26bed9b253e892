#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "winnow/types.hpp"

namespace winnow {

// The query ⊕ document text handed to the embedder.
struct QueryDocumentPrompt {
    std::string query;
    std::string document;
    std::string rendered;
};

// Abstract text embedder. Implementations must be deterministic within a
// run: identical input text yields an identical vector.
class Embedder {
public:
    virtual ~Embedder() = default;

    // Embed a batch of texts, one vector per text, in input order.
    virtual std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) = 0;
};

struct EmbedOptions {
    bool trust_precomputed = true;
    int batch_size = 32;
};

// Builds the query-aware embedding prompt for one document.
// Template: "Query: {query}\nDocument: {title}\n{text}".
QueryDocumentPrompt render_embedding_prompt(const std::string& query,
                                            const RetrievedDocument& document);

// Embeds all documents for a query, order-preserving. Documents carrying a
// precomputed embedding are passed through unchanged when
// opts.trust_precomputed is set. Throws ConfigError if the resulting
// vectors do not share one dimension.
std::vector<Embedding> embed_documents(const std::string& query,
                                       const std::vector<RetrievedDocument>& docs,
                                       Embedder& embedder,
                                       const EmbedOptions& opts = {});

// Deterministic in-process embedder for tests and offline runs: vector
// values are drawn from an RNG seeded by a stable hash of the text.
class HashEmbedder : public Embedder {
public:
    explicit HashEmbedder(int dimension = 8) : dimension_(dimension) {}

    std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) override;

    int dimension() const { return dimension_; }

private:
    int dimension_;
};

// HTTP embedder speaking the common embeddings wire protocol:
// POST {base_url}/embeddings with {"model", "input": [texts]},
// response {"data": [{"embedding": [floats]}]}.
class HttpEmbedder : public Embedder {
public:
    struct Config {
        std::string base_url;
        std::string model;
        std::string api_key;
        int timeout_seconds = 60;
    };

    explicit HttpEmbedder(Config config) : config_(std::move(config)) {}

    std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) override;

private:
    Config config_;
};

// Stable 64-bit FNV-1a hash, used for scripted-backend fingerprints and
// the hash embedder seed.
std::uint64_t fnv1a64(const std::string& text);

}  // namespace winnow
