#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mutex>

#include "winnow/embedding.hpp"

using namespace winnow;

namespace {

// Records every text it is asked to embed.
class CapturingEmbedder : public Embedder {
public:
    explicit CapturingEmbedder(int dim = 4) : dim_(dim) {}

    std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) override {
        std::lock_guard<std::mutex> lock(mutex_);
        std::vector<Embedding> out;
        for (const auto& text : texts) {
            captured_.push_back(text);
            out.push_back(Embedding(dim_, static_cast<double>(captured_.size())));
        }
        return out;
    }

    std::vector<std::string> captured() const { return captured_; }

private:
    int dim_;
    std::mutex mutex_;
    std::vector<std::string> captured_;
};

RetrievedDocument doc(const std::string& id, const std::string& title, const std::string& text) {
    RetrievedDocument d;
    d.id = id;
    d.title = title;
    d.text = text;
    return d;
}

}  // namespace

TEST_CASE("render_embedding_prompt contains query and document verbatim") {
    const auto prompt = render_embedding_prompt("who wrote X", doc("d1", "T", "B"));
    CHECK(prompt.rendered.find("who wrote X") != std::string::npos);
    CHECK(prompt.rendered.find("B") != std::string::npos);
    CHECK(prompt.rendered == "Query: who wrote X\nDocument: T\nB");
}

TEST_CASE("render_embedding_prompt rejects empty inputs") {
    CHECK_THROWS_AS(render_embedding_prompt("", doc("d1", "T", "B")), InputError);
    CHECK_THROWS_AS(render_embedding_prompt("q", doc("d1", "T", "")), InputError);
}

TEST_CASE("distinct queries render distinct prompts for the same document") {
    const auto d = doc("d1", "T", "body");
    CHECK(render_embedding_prompt("query one", d).rendered !=
          render_embedding_prompt("query two", d).rendered);
}

TEST_CASE("embed_documents is order-preserving, one vector per document") {
    CapturingEmbedder embedder;
    const std::vector<RetrievedDocument> docs = {doc("a", "ta", "xa"), doc("b", "tb", "xb"),
                                                 doc("c", "tc", "xc")};
    const auto vectors = embed_documents("q", docs, embedder);
    REQUIRE(vectors.size() == 3);
    CHECK(vectors[0][0] == 1.0);
    CHECK(vectors[1][0] == 2.0);
    CHECK(vectors[2][0] == 3.0);
}

TEST_CASE("precomputed embeddings pass through when trusted") {
    CapturingEmbedder embedder;
    auto d1 = doc("a", "t", "x");
    d1.embedding = Embedding{1.0, 2.0, 3.0, 4.0};
    auto d2 = doc("b", "t", "y");
    d2.embedding = Embedding{5.0, 6.0, 7.0, 8.0};

    SUBCASE("trusted: returned unchanged, embedder never called") {
        const auto vectors = embed_documents("q", {d1, d2}, embedder);
        CHECK(vectors[0] == *d1.embedding);
        CHECK(vectors[1] == *d2.embedding);
        CHECK(embedder.captured().empty());
    }
    SUBCASE("not trusted: embedder used instead") {
        EmbedOptions opts;
        opts.trust_precomputed = false;
        const auto vectors = embed_documents("q", {d1, d2}, embedder, opts);
        CHECK(vectors[0] != *d1.embedding);
        CHECK(embedder.captured().size() == 2);
    }
}

TEST_CASE("dimension mismatch is a fatal configuration error") {
    class MixedDims : public Embedder {
    public:
        std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) override {
            std::vector<Embedding> out;
            for (std::size_t i = 0; i < texts.size(); ++i) {
                out.push_back(Embedding(i == 2 ? 5 : 4, 0.0));
            }
            return out;
        }
    } embedder;
    const std::vector<RetrievedDocument> docs = {doc("a", "t", "x"), doc("b", "t", "y"),
                                                 doc("c", "t", "z")};
    CHECK_THROWS_AS(embed_documents("q", docs, embedder), ConfigError);
}

TEST_CASE("embed_documents rejects empty document list") {
    CapturingEmbedder embedder;
    CHECK_THROWS_AS(embed_documents("q", {}, embedder), InputError);
}

TEST_CASE("query-awareness: changing the query changes every embedder input") {
    const std::vector<RetrievedDocument> docs = {doc("a", "t", "x"), doc("b", "t", "y")};
    CapturingEmbedder first;
    embed_documents("query alpha", docs, first);
    CapturingEmbedder second;
    embed_documents("query beta", docs, second);

    const auto a = first.captured();
    const auto b = second.captured();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] != b[i]);
        CHECK(a[i].find("query alpha") != std::string::npos);
        CHECK(b[i].find("query beta") != std::string::npos);
    }
}

TEST_CASE("hash embedder is deterministic and batch-size independent") {
    HashEmbedder embedder(8);
    const std::vector<RetrievedDocument> docs = {doc("a", "t", "one"), doc("b", "t", "two")};
    const auto first = embed_documents("q", docs, embedder);
    const auto second = embed_documents("q", docs, embedder);
    CHECK(first == second);
    REQUIRE(first.size() == 2);
    CHECK(first[0].size() == 8);
    CHECK(first[0] != first[1]);

    EmbedOptions small_batches;
    small_batches.batch_size = 1;
    CHECK(embed_documents("q", docs, embedder, small_batches) == first);
}
