#include <catch2/catch_amalgamated.hpp>

#include "propmatch/baselines.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace propmatch;

namespace {

std::set<std::string> random_string_set(propmatch::detail::Rng& rng,
                                        std::size_t n) {
    std::set<std::string> out;
    while (out.size() < n) {
        std::string s;
        for (int i = 0; i < 8; ++i)
            s.push_back(static_cast<char>('a' + rng.next_index(26)));
        out.insert(s);
    }
    return out;
}

}  // namespace

TEST_CASE("cosine baseline scores name embeddings", "[baselines]") {
    const synthetic::Vocabulary vocab = synthetic::make_vocabulary();
    const EmbeddingTable table = vocab.table();

    std::vector<PropertyInstance> instances = {
        {"s1", "c", "e", "weight", "1"},
        {"s2", "c", "e", "weight", "2"},
        {"s2", "c", "e", "zqxv", "3"},
        {"s2", "c", "e", "refresh rate", "4"},
    };
    const Corpus corpus = Corpus::from_instances(instances);
    const SimilarityGraph graph = cosine_match(corpus, table, 0.5);
    REQUIRE(graph.edges.size() == 3);

    std::map<std::pair<std::string, std::string>, double> scores;
    for (const auto& e : graph.edges)
        scores[{e.a.name, e.b.name}] = e.score;

    SECTION("identical names score exactly 1") {
        CHECK(scores.at({"weight", "weight"}) == 1.0);
    }
    SECTION("fully out-of-vocabulary name scores 0") {
        CHECK(scores.at({"weight", "zqxv"}) == 0.0);
    }
    SECTION("cross-concept names agree with the cosine oracle") {
        const auto u = average_embedding(table, tokenize("weight"));
        const auto v = average_embedding(table, tokenize("refresh rate"));
        const double expected =
            std::min(1.0, std::max(0.0, oracles::cosine(u, v)));
        CHECK(scores.at({"weight", "refresh rate"}) ==
              Catch::Approx(expected).margin(1e-12));
    }
}

TEST_CASE("minhash signatures", "[baselines]") {
    propmatch::detail::Rng rng(606);

    SECTION("identical sets give identical signatures") {
        const auto values = random_string_set(rng, 60);
        const MinHashSignature a = minhash_signature(values, 500, 9);
        const MinHashSignature b = minhash_signature(values, 500, 9);
        CHECK(a.values == b.values);
        CHECK(minhash_agreement(a, b) == 1.0);
    }
    SECTION("different seeds give different signatures") {
        const auto values = random_string_set(rng, 60);
        const MinHashSignature a = minhash_signature(values, 500, 9);
        const MinHashSignature b = minhash_signature(values, 500, 10);
        CHECK(a.values != b.values);
    }
    SECTION("disjoint sets estimate near zero") {
        const auto a = random_string_set(rng, 80);
        auto b = random_string_set(rng, 80);
        for (const auto& s : a) b.erase(s);
        const double est = minhash_agreement(minhash_signature(a, 500, 3),
                                             minhash_signature(b, 500, 3));
        CHECK(est < 0.05);
    }
    SECTION("sets with Jaccard 0.5 estimate within 0.1") {
        // |A|=|B|=60, |A∩B|=40, |A∪B|=80 -> J=0.5
        const auto pool = random_string_set(rng, 80);
        std::vector<std::string> items(pool.begin(), pool.end());
        std::set<std::string> a(items.begin(), items.begin() + 60);
        std::set<std::string> b(items.begin() + 20, items.end());
        REQUIRE(oracles::jaccard(a, b) == 0.5);
        const double est = minhash_agreement(minhash_signature(a, 500, 3),
                                             minhash_signature(b, 500, 3));
        CHECK(est == Catch::Approx(0.5).margin(0.1));
    }
    SECTION("empty set is an error") {
        CHECK_THROWS_AS(minhash_signature({}, 500, 0), error);
        CHECK_THROWS_AS(minhash_signature({"x"}, 0, 0), error);
    }
}

TEST_CASE("minhash estimator tracks exact Jaccard", "[baselines]") {
    propmatch::detail::Rng rng(123);
    double total_err = 0.0;
    int n = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t overlap = 10 + rng.next_index(50);
        const auto pool = random_string_set(rng, 120);
        std::vector<std::string> items(pool.begin(), pool.end());
        std::set<std::string> a(items.begin(), items.begin() + 60);
        std::set<std::string> b(items.begin() + 60 - overlap,
                                items.begin() + 120 - overlap);
        const double exact = oracles::jaccard(a, b);
        const double est =
            minhash_agreement(minhash_signature(a, 500, trial),
                              minhash_signature(b, 500, trial));
        total_err += std::abs(est - exact);
        ++n;
    }
    CHECK(total_err / n <= 0.05);
}

TEST_CASE("minhash matcher over a corpus", "[baselines]") {
    SECTION("duplicated property scores 1.0") {
        std::vector<PropertyInstance> instances = {
            {"s1", "c", "e1", "p", "Alpha"},
            {"s1", "c", "e2", "p", "beta"},
            {"s2", "c", "e1", "q", "alpha "},  // same set after normalization
            {"s2", "c", "e2", "q", "BETA"},
            {"s2", "c", "e3", "r", "gamma"},
        };
        const Corpus corpus = Corpus::from_instances(instances);
        const SimilarityGraph graph = minhash_match(corpus, 500, 1, 0.5);
        REQUIRE(graph.edges.size() == 2);
        std::map<std::string, double> by_name;
        for (const auto& e : graph.edges) by_name[e.b.name] = e.score;
        CHECK(by_name.at("q") == 1.0);
        CHECK(by_name.at("r") < 0.05);
    }
    SECTION("scores are deterministic given the seed") {
        const synthetic::Dataset ds = synthetic::camera_domain();
        const Corpus corpus = ds.corpus();
        const SimilarityGraph a = minhash_match(corpus, 100, 4, 0.5);
        const SimilarityGraph b = minhash_match(corpus, 100, 4, 0.5);
        REQUIRE(a.edges.size() == b.edges.size());
        for (std::size_t i = 0; i < a.edges.size(); ++i)
            REQUIRE(a.edges[i].score == b.edges[i].score);
    }
}
