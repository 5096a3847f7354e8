#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "propmatch/corpus.hpp"
#include "propmatch/embedding.hpp"
#include "propmatch/matcher.hpp"

namespace propmatch {

// Unsupervised reference matcher: cosine similarity of the two properties'
// name average-embeddings, clamped to [0, 1]; an all-zero vector (fully
// out-of-vocabulary name) scores 0.
inline SimilarityGraph cosine_match(const Corpus& corpus,
                                    const EmbeddingTable& table,
                                    double threshold = 0.5) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw error("threshold must be in [0, 1]");
    const std::vector<RefPair> pairs = candidate_pairs(corpus);
    detail::check_candidate_cap(pairs.size());
    std::map<PropertyRef, std::vector<double>> name_vectors;
    for (const auto& ref : corpus.refs())
        name_vectors.emplace(ref, average_embedding(table, tokenize(ref.name)));

    auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };

    SimilarityGraph graph;
    graph.edges.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        const auto& va = name_vectors.at(a);
        const auto& vb = name_vectors.at(b);
        const double na = norm(va), nb = norm(vb);
        double score = 0.0;
        if (na > 0.0 && nb > 0.0) {
            if (va == vb) {
                score = 1.0;  // identical vectors must score exactly 1
            } else {
                double dot = 0.0;
                for (std::size_t i = 0; i < va.size(); ++i)
                    dot += va[i] * vb[i];
                score = dot / (na * nb);
                score = std::min(1.0, std::max(0.0, score));
            }
        }
        graph.edges.push_back({a, b, score, score >= threshold});
    }
    graph.metadata = {
        {"matcher", "cosine"},
        {"threshold", threshold},
        {"corpus_fingerprint", detail::to_hex(corpus.fingerprint())},
    };
    return graph;
}

// Minhash signature: one minimum per seeded 64-bit hash function, over a set
// of normalized instance values. The fraction of agreeing positions between
// two signatures estimates the Jaccard similarity of the underlying sets.
struct MinHashSignature {
    std::vector<std::uint64_t> values;
};

inline MinHashSignature minhash_signature(const std::set<std::string>& values,
                                          int k, std::uint64_t seed) {
    if (k < 1) throw error("minhash requires k >= 1");
    if (values.empty()) throw error("minhash signature of an empty set");
    MinHashSignature sig;
    sig.values.assign(static_cast<std::size_t>(k), UINT64_MAX);
    std::vector<std::uint64_t> function_seeds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < function_seeds.size(); ++i)
        function_seeds[i] = detail::derive_seed(seed, i);
    for (const auto& v : values) {
        const std::uint64_t base = detail::fnv1a64(v);
        for (std::size_t i = 0; i < sig.values.size(); ++i) {
            const std::uint64_t h = detail::mix64(base ^ function_seeds[i]);
            if (h < sig.values[i]) sig.values[i] = h;
        }
    }
    return sig;
}

inline double minhash_agreement(const MinHashSignature& a,
                                const MinHashSignature& b) {
    if (a.values.size() != b.values.size() || a.values.empty())
        throw error("signature length mismatch");
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        if (a.values[i] == b.values[i]) ++agree;
    return static_cast<double>(agree) / static_cast<double>(a.values.size());
}

// Unsupervised instance-set matcher. Per property, a signature over the set
// of lowercased and trimmed instance values; with band size 1 every pair
// that agrees on at least one signature position is a candidate, and its
// score is the agreement fraction (pairs agreeing nowhere score 0).
inline SimilarityGraph minhash_match(const Corpus& corpus, int k = 500,
                                     std::uint64_t seed = 0,
                                     double threshold = 0.5) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw error("threshold must be in [0, 1]");
    const std::vector<RefPair> pairs = candidate_pairs(corpus);
    detail::check_candidate_cap(pairs.size());
    std::map<PropertyRef, MinHashSignature> signatures;
    for (const auto& ref : corpus.refs()) {
        std::set<std::string> normalized;
        for (const auto& value : corpus.values_of(ref))
            normalized.insert(detail::lowercase(detail::trim(value)));
        signatures.emplace(ref, minhash_signature(normalized, k, seed));
    }

    SimilarityGraph graph;
    graph.edges.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        const double score =
            minhash_agreement(signatures.at(a), signatures.at(b));
        graph.edges.push_back({a, b, score, score >= threshold});
    }
    graph.metadata = {
        {"matcher", "minhash"},
        {"k", k},
        {"seed", seed},
        {"threshold", threshold},
        {"corpus_fingerprint", detail::to_hex(corpus.fingerprint())},
    };
    return graph;
}

}  // namespace propmatch
