#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support/test_util.hpp"
#include "winnow/merge_geometry.hpp"

using namespace winnow;

namespace {

// Independent brute-force filters applying the merge definitions literally
// over an explicit enumeration of the union. Kept separate from the
// library implementation on purpose.
std::set<std::string> oracle_ellipse(const DocumentCluster& a, const DocumentCluster& b) {
    std::map<std::string, Embedding> all;
    all.insert(a.vectors.begin(), a.vectors.end());
    all.insert(b.vectors.begin(), b.vectors.end());

    auto l2 = [](const Embedding& x, const Embedding& y) {
        double s = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) s += (x[d] - y[d]) * (x[d] - y[d]);
        return std::sqrt(s);
    };
    double total = 0.0;
    for (const auto& [id, v] : all) total += l2(v, a.centroid) + l2(v, b.centroid);
    const double threshold = total / static_cast<double>(all.size());

    std::set<std::string> kept;
    for (const auto& [id, v] : all) {
        if (l2(v, a.centroid) + l2(v, b.centroid) <= threshold) kept.insert(id);
    }
    return kept;
}

std::set<std::string> oracle_hyperbola(const DocumentCluster& retained,
                                       const DocumentCluster& discarded) {
    std::map<std::string, Embedding> all;
    all.insert(retained.vectors.begin(), retained.vectors.end());
    all.insert(discarded.vectors.begin(), discarded.vectors.end());

    auto l2 = [](const Embedding& x, const Embedding& y) {
        double s = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) s += (x[d] - y[d]) * (x[d] - y[d]);
        return std::sqrt(s);
    };
    double sum_i = 0.0;
    double sum_j = 0.0;
    for (const auto& [id, v] : all) {
        sum_i += l2(v, retained.centroid);
        sum_j += l2(v, discarded.centroid);
    }
    const double t_i = sum_i / static_cast<double>(all.size());
    const double t_j = sum_j / static_cast<double>(all.size());

    std::set<std::string> kept;
    for (const auto& [id, v] : all) {
        if (l2(v, discarded.centroid) - l2(v, retained.centroid) > t_j - t_i) kept.insert(id);
    }
    if (kept.empty()) kept = retained.doc_ids;
    return kept;
}

DocumentCluster cluster_1d(const std::map<std::string, double>& points) {
    std::map<std::string, Embedding> members;
    for (const auto& [id, x] : points) members[id] = {x};
    return make_cluster(members);
}

}  // namespace

TEST_CASE("euclidean_distance basics") {
    CHECK(euclidean_distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
    CHECK(euclidean_distance({1.5, -2.0}, {1.5, -2.0}) == 0.0);
    CHECK(euclidean_distance({1}, {4}) == doctest::Approx(3.0));
    CHECK_THROWS_AS(euclidean_distance({1, 2}, {1, 2, 3}), InputError);
}

TEST_CASE("ellipse merge: hand-derived 1-dim fixture keeps {b, c}") {
    const auto ci = cluster_1d({{"a", 0.0}, {"b", 1.0}});
    const auto cj = cluster_1d({{"c", 3.0}, {"d", 4.0}});
    const auto result = ellipse_merge(ci, cj);
    CHECK(result.kept_doc_ids == std::set<std::string>{"b", "c"});
    CHECK(result.thresholds.t_ij == doctest::Approx(3.5));
}

TEST_CASE("ellipse merge: identical single points keep both ids") {
    const auto ci = cluster_1d({{"p", 2.0}});
    const auto cj = cluster_1d({{"q", 2.0}});
    const auto result = ellipse_merge(ci, cj);
    CHECK(result.kept_doc_ids == std::set<std::string>{"p", "q"});
    CHECK(result.thresholds.t_ij == doctest::Approx(0.0));
}

TEST_CASE("hyperbola merge: hand-derived 1-dim fixture keeps {a, b}") {
    const auto retained = cluster_1d({{"a", 0.0}, {"b", 1.0}});
    const auto discarded = cluster_1d({{"c", 3.0}, {"d", 4.0}});
    const auto result = hyperbola_merge(retained, discarded);
    CHECK(result.kept_doc_ids == std::set<std::string>{"a", "b"});
    CHECK(result.thresholds.t_i == doctest::Approx(1.75));
    CHECK(result.thresholds.t_j == doctest::Approx(1.75));
}

TEST_CASE("hyperbola merge: discarded document near the retained centroid survives") {
    const auto retained = cluster_1d({{"a", 0.0}});
    const auto discarded = cluster_1d({{"c", 2.0}, {"d", 10.0}});
    const auto result = hyperbola_merge(retained, discarded);
    CHECK(result.kept_doc_ids == std::set<std::string>{"a", "c"});
    CHECK(result.thresholds.t_i == doctest::Approx(4.0));
    CHECK(result.thresholds.t_j == doctest::Approx(14.0 / 3.0));
}

TEST_CASE("hyperbola merge: degenerate identical clusters fall back to retained docs") {
    const auto retained = cluster_1d({{"p", 1.0}});
    const auto discarded = cluster_1d({{"q", 1.0}});
    const auto result = hyperbola_merge(retained, discarded);
    CHECK(result.kept_doc_ids == std::set<std::string>{"p"});
}

TEST_CASE("merges match the brute-force oracle on random instances") {
    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<std::size_t> dim_dist(2, 16);
        std::uniform_int_distribution<std::size_t> size_dist(1, 50);
        const std::size_t dim = dim_dist(rng);
        const auto a = test::cluster_from(test::random_vectors(size_dist(rng), dim, rng), "a");
        const auto b = test::cluster_from(test::random_vectors(size_dist(rng), dim, rng), "b");

        CHECK(ellipse_merge(a, b).kept_doc_ids == oracle_ellipse(a, b));
        CHECK(hyperbola_merge(a, b).kept_doc_ids == oracle_hyperbola(a, b));
    }
}

TEST_CASE("ellipse merge is symmetric, nonempty, and a subset of the union") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<std::size_t> size_dist(1, 30);
        const auto a = test::cluster_from(test::random_vectors(size_dist(rng), 4, rng), "a");
        const auto b = test::cluster_from(test::random_vectors(size_dist(rng), 4, rng), "b");
        const auto ab = ellipse_merge(a, b);
        const auto ba = ellipse_merge(b, a);

        CHECK(ab.kept_doc_ids == ba.kept_doc_ids);
        CHECK(!ab.kept_doc_ids.empty());
        for (const auto& id : ab.kept_doc_ids) {
            CHECK((a.doc_ids.count(id) || b.doc_ids.count(id)));
        }
    }
}

TEST_CASE("merges are invariant under rotation plus translation") {
    std::mt19937_64 rng(4242);
    const double angle = 0.7;
    auto transform = [&](const Embedding& v) {
        // Rotate in the first two coordinates, then translate.
        Embedding out = v;
        out[0] = std::cos(angle) * v[0] - std::sin(angle) * v[1] + 3.0;
        out[1] = std::sin(angle) * v[0] + std::cos(angle) * v[1] - 1.5;
        return out;
    };
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<std::size_t> size_dist(1, 20);
        const auto va = test::random_vectors(size_dist(rng), 3, rng);
        const auto vb = test::random_vectors(size_dist(rng), 3, rng);
        std::vector<Embedding> ta;
        std::vector<Embedding> tb;
        for (const auto& v : va) ta.push_back(transform(v));
        for (const auto& v : vb) tb.push_back(transform(v));

        const auto a = test::cluster_from(va, "a");
        const auto b = test::cluster_from(vb, "b");
        const auto a2 = test::cluster_from(ta, "a");
        const auto b2 = test::cluster_from(tb, "b");

        CHECK(ellipse_merge(a, b).kept_doc_ids == ellipse_merge(a2, b2).kept_doc_ids);
        CHECK(hyperbola_merge(a, b).kept_doc_ids == hyperbola_merge(a2, b2).kept_doc_ids);
    }
}

TEST_CASE("nearest_remaining_cluster") {
    const auto incorrect = cluster_1d({{"x", 0.0}});
    SUBCASE("argmin over centroids") {
        const std::vector<DocumentCluster> remaining = {
            cluster_1d({{"a", 5.0}}), cluster_1d({{"b", 2.0}}), cluster_1d({{"c", 9.0}})};
        CHECK(nearest_remaining_cluster(incorrect, remaining) == 1);
    }
    SUBCASE("ties break to the lowest index") {
        const std::vector<DocumentCluster> remaining = {cluster_1d({{"a", 2.0}}),
                                                        cluster_1d({{"b", 2.0}})};
        CHECK(nearest_remaining_cluster(incorrect, remaining) == 0);
    }
    SUBCASE("single remaining cluster") {
        const std::vector<DocumentCluster> remaining = {cluster_1d({{"a", 7.0}})};
        CHECK(nearest_remaining_cluster(incorrect, remaining) == 0);
    }
    SUBCASE("empty remaining set throws") {
        CHECK_THROWS_AS(nearest_remaining_cluster(incorrect, {}), InputError);
    }
    SUBCASE("invariant under uniform positive scaling") {
        std::mt19937_64 rng(11);
        const auto vectors = test::random_vectors(6, 3, rng);
        std::vector<DocumentCluster> remaining;
        for (std::size_t i = 1; i < vectors.size(); ++i) {
            remaining.push_back(test::cluster_from({vectors[i]}, "c" + std::to_string(i)));
        }
        const auto probe = test::cluster_from({vectors[0]}, "p");

        auto scaled = [](const DocumentCluster& c, double factor) {
            std::map<std::string, Embedding> members;
            for (const auto& [id, v] : c.vectors) {
                Embedding s = v;
                for (auto& x : s) x = factor * (x - 0.25) + 0.25;
                members[id] = s;
            }
            return make_cluster(members);
        };
        std::vector<DocumentCluster> scaled_remaining;
        for (const auto& c : remaining) scaled_remaining.push_back(scaled(c, 3.5));
        CHECK(nearest_remaining_cluster(probe, remaining) ==
              nearest_remaining_cluster(scaled(probe, 3.5), scaled_remaining));
    }
}

TEST_CASE("cluster centroid is the mean of its members") {
    const auto c = cluster_1d({{"a", 1.0}, {"b", 2.0}, {"c", 6.0}});
    CHECK(c.centroid[0] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK_THROWS_AS(make_cluster({}), InputError);
}
