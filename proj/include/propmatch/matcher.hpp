#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "propmatch/classifier.hpp"
#include "propmatch/corpus.hpp"
#include "propmatch/features.hpp"

namespace propmatch {

// Guard against accidental all-pairs blow-ups; matching is desk-scale.
inline constexpr std::size_t kMaxCandidatePairs = 10'000'000;

struct SimilarityEdge {
    PropertyRef a;
    PropertyRef b;
    double score = 0.0;
    bool match = false;
};

// One edge per candidate pair, canonically ordered, no duplicates.
struct SimilarityGraph {
    std::vector<SimilarityEdge> edges;
    nlohmann::json metadata;
};

namespace detail {

inline void check_candidate_cap(std::size_t n) {
    if (n > kMaxCandidatePairs)
        throw error("candidate pair count " + std::to_string(n) +
                    " exceeds the cap of " +
                    std::to_string(kMaxCandidatePairs) +
                    "; restrict sources or classes");
}

}  // namespace detail

// Scores every cross-source same-class candidate pair with the trained
// model. Scoring is parallel over pairs; edges are emitted in canonical pair
// order, so the result is identical for any job count.
inline SimilarityGraph match_all(const Corpus& corpus,
                                 const EmbeddingTable& table,
                                 const ClassifierModel& model,
                                 double threshold = 0.5, unsigned jobs = 1) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw error("threshold must be in (0, 1)");
    const std::vector<RefPair> pairs = candidate_pairs(corpus);
    detail::check_candidate_cap(pairs.size());
    const auto features = compute_property_features(corpus, table, jobs);

    SimilarityGraph graph;
    graph.edges.resize(pairs.size());
    detail::parallel_chunks(
        pairs.size(), jobs, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const auto& [a, b] = pairs[i];
                const std::vector<double> pf = pair_features(
                    features.at(a), features.at(b), a.name, b.name);
                const Prediction pred = model.predict(pf);
                graph.edges[i] =
                    {a, b, pred.score, pred.score >= threshold};
            }
        });
    graph.metadata = {
        {"matcher", "classifier"},
        {"threshold", threshold},
        {"model_fingerprint", detail::to_hex(model.fingerprint())},
        {"corpus_fingerprint", detail::to_hex(corpus.fingerprint())},
    };
    return graph;
}

// Connected components over match-flagged edges (transitive closure).
// Singleton properties are not reported; members and clusters are sorted
// canonically.
inline std::vector<std::vector<PropertyRef>> connected_components(
    const SimilarityGraph& graph) {
    std::map<PropertyRef, std::size_t> ids;
    std::vector<const PropertyRef*> refs;
    auto id_of = [&](const PropertyRef& r) {
        auto [it, inserted] = ids.emplace(r, ids.size());
        if (inserted) refs.push_back(&it->first);
        return it->second;
    };
    std::vector<std::size_t> parent;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& e : graph.edges) {
        if (!e.match) continue;
        const std::size_t ia = id_of(e.a), ib = id_of(e.b);
        while (parent.size() < ids.size()) parent.push_back(parent.size());
        parent[find(ia)] = find(ib);
    }
    std::map<std::size_t, std::vector<PropertyRef>> groups;
    for (std::size_t i = 0; i < parent.size(); ++i)
        groups[find(i)].push_back(*refs[i]);
    std::vector<std::vector<PropertyRef>> out;
    for (auto& [root, members] : groups) {
        if (members.size() < 2) continue;
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Similarity graph file: a metadata header line, then one edge per line:
//   {"a": {"source","class","property"}, "b": {...}, "score": f, "match": b}
inline void write_graph(const std::string& path, const SimilarityGraph& graph) {
    std::ofstream out = detail::open_output(path);
    out << nlohmann::json{{"metadata", graph.metadata}}.dump() << '\n';
    for (const auto& e : graph.edges) {
        nlohmann::json obj{{"a", ref_to_json(e.a)},
                           {"b", ref_to_json(e.b)},
                           {"score", e.score},
                           {"match", e.match}};
        out << obj.dump() << '\n';
    }
    if (!out) throw error("failed writing similarity graph: " + path);
}

inline SimilarityGraph read_graph(const std::string& path) {
    SimilarityGraph graph;
    bool header_seen = false;
    detail::for_each_line(path, [&](std::size_t lineno,
                                    const std::string& line) {
        if (detail::is_blank(line)) return;
        nlohmann::json obj = detail::parse_jsonl_object(path, lineno, line);
        if (!header_seen) {
            if (!obj.contains("metadata"))
                throw error(path + ":1: missing metadata header line");
            graph.metadata = obj["metadata"];
            header_seen = true;
            return;
        }
        auto ref_from = [&](const nlohmann::json& j) {
            PropertyRef r;
            r.source = detail::required_string(j, "source", path, lineno);
            r.cls = detail::required_string(j, "class", path, lineno);
            r.name = detail::required_string(j, "property", path, lineno);
            return r;
        };
        if (!obj.contains("a") || !obj.contains("b") ||
            !obj.contains("score") || !obj.contains("match"))
            throw error(path + ":" + std::to_string(lineno) +
                        ": malformed edge record");
        SimilarityEdge e;
        e.a = ref_from(obj["a"]);
        e.b = ref_from(obj["b"]);
        e.score = obj["score"].get<double>();
        e.match = obj["match"].get<bool>();
        graph.edges.push_back(std::move(e));
    });
    if (!header_seen) throw error("empty similarity graph file: " + path);
    return graph;
}

// Clusters file: JSON Lines, one cluster per line:
//   {"cluster_id": int, "members": [{"source","class","property"}, ...]}
inline void write_clusters(const std::string& path,
                           const std::vector<std::vector<PropertyRef>>& clusters) {
    std::ofstream out = detail::open_output(path);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        nlohmann::json members = nlohmann::json::array();
        for (const auto& ref : clusters[i]) members.push_back(ref_to_json(ref));
        out << nlohmann::json{{"cluster_id", i}, {"members", members}}.dump()
            << '\n';
    }
    if (!out) throw error("failed writing clusters: " + path);
}

}  // namespace propmatch
