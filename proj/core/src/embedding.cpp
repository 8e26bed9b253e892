#include "winnow/embedding.hpp"

#include <random>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "winnow/net.hpp"

namespace winnow {

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

QueryDocumentPrompt render_embedding_prompt(const std::string& query,
                                            const RetrievedDocument& document) {
    if (query.empty()) {
        throw InputError("render_embedding_prompt: empty query");
    }
    if (document.text.empty()) {
        throw InputError("render_embedding_prompt: empty document text");
    }
    QueryDocumentPrompt prompt;
    prompt.query = query;
    prompt.document = document.text;
    prompt.rendered = "Query: " + query + "\nDocument: " + document.title + "\n" + document.text;
    return prompt;
}

std::vector<Embedding> embed_documents(const std::string& query,
                                       const std::vector<RetrievedDocument>& docs,
                                       Embedder& embedder, const EmbedOptions& opts) {
    if (docs.empty()) {
        throw InputError("embed_documents: no documents");
    }
    std::vector<Embedding> result(docs.size());
    std::vector<std::size_t> pending;  // indexes that need an embedder call
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (opts.trust_precomputed && docs[i].embedding.has_value()) {
            result[i] = *docs[i].embedding;
        } else {
            pending.push_back(i);
        }
    }

    const int batch = opts.batch_size > 0 ? opts.batch_size : 32;
    for (std::size_t start = 0; start < pending.size(); start += batch) {
        const std::size_t end = std::min(pending.size(), start + batch);
        std::vector<std::string> texts;
        texts.reserve(end - start);
        for (std::size_t p = start; p < end; ++p) {
            texts.push_back(render_embedding_prompt(query, docs[pending[p]]).rendered);
        }
        std::vector<Embedding> vectors = embedder.embed_batch(texts);
        if (vectors.size() != texts.size()) {
            throw BackendError("embedder returned " + std::to_string(vectors.size()) +
                               " vectors for " + std::to_string(texts.size()) + " texts");
        }
        for (std::size_t p = start; p < end; ++p) {
            result[pending[p]] = std::move(vectors[p - start]);
        }
    }

    const std::size_t dim = result.front().size();
    for (std::size_t i = 0; i < result.size(); ++i) {
        if (result[i].empty() || result[i].size() != dim) {
            throw ConfigError("embedding dimension mismatch: document " + std::to_string(i) +
                              " has dimension " + std::to_string(result[i].size()) +
                              ", expected " + std::to_string(dim));
        }
    }
    return result;
}

std::vector<Embedding> HashEmbedder::embed_batch(const std::vector<std::string>& texts) {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        std::mt19937_64 rng(fnv1a64(text));
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Embedding vec(dimension_);
        for (auto& v : vec) v = dist(rng);
        out.push_back(std::move(vec));
    }
    return out;
}

std::vector<Embedding> HttpEmbedder::embed_batch(const std::vector<std::string>& texts) {
    net::check_network_allowed();

    nlohmann::json body;
    body["model"] = config_.model;
    body["input"] = texts;

    httplib::Client client(config_.base_url);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    auto res = client.Post("/embeddings", headers, body.dump(), "application/json");
    if (!res) {
        throw BackendError("embedding endpoint unreachable: " + config_.base_url);
    }
    if (res->status != 200) {
        throw BackendError("embedding endpoint returned HTTP " + std::to_string(res->status));
    }

    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedResponseError(std::string("embedding response is not JSON: ") + e.what());
    }
    if (!parsed.contains("data") || !parsed["data"].is_array()) {
        throw MalformedResponseError("embedding response missing data array");
    }
    std::vector<Embedding> out;
    for (const auto& item : parsed["data"]) {
        if (!item.contains("embedding")) {
            throw MalformedResponseError("embedding item missing vector");
        }
        out.push_back(item["embedding"].get<Embedding>());
    }
    return out;
}

}  // namespace winnow
