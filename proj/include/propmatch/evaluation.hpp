#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "propmatch/classifier.hpp"
#include "propmatch/corpus.hpp"
#include "propmatch/features.hpp"
#include "propmatch/matcher.hpp"

namespace propmatch {

struct SDConfig {
    double training_fraction = 0.2;
    int repetitions = 25;
    std::uint64_t seed = 0;
    int negative_ratio = 2;
    // Sensitivity mode: apply the negative ratio to the test scope as well
    // instead of evaluating every remaining candidate pair.
    bool sample_test = false;
};

struct RunRecord {
    int run_index = 0;
    std::vector<std::string> train_sources;
    std::size_t tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0;
};

struct EvalReport {
    std::vector<RunRecord> runs;
    MetricSummary precision, recall, f1;
    nlohmann::json warnings = nlohmann::json::array();

    void finalize() {
        auto summarize = [this](auto metric) {
            MetricSummary s;
            if (runs.empty()) return s;
            for (const auto& r : runs) s.mean += metric(r);
            s.mean /= static_cast<double>(runs.size());
            if (runs.size() > 1) {
                double acc = 0.0;
                for (const auto& r : runs) {
                    const double d = metric(r) - s.mean;
                    acc += d * d;
                }
                s.stddev =
                    std::sqrt(acc / static_cast<double>(runs.size() - 1));
            }
            return s;
        };
        precision = summarize([](const RunRecord& r) { return r.precision; });
        recall = summarize([](const RunRecord& r) { return r.recall; });
        f1 = summarize([](const RunRecord& r) { return r.f1; });
    }

    nlohmann::json to_json() const {
        nlohmann::json run_array = nlohmann::json::array();
        for (const auto& r : runs)
            run_array.push_back({{"run", r.run_index},
                                 {"train_sources", r.train_sources},
                                 {"tp", r.tp},
                                 {"fp", r.fp},
                                 {"fn", r.fn},
                                 {"precision", r.precision},
                                 {"recall", r.recall},
                                 {"f1", r.f1}});
        nlohmann::json aggregate{
            {"precision", {{"mean", precision.mean}, {"stddev", precision.stddev}}},
            {"recall", {{"mean", recall.mean}, {"stddev", recall.stddev}}},
            {"f1", {{"mean", f1.mean}, {"stddev", f1.stddev}}}};
        nlohmann::json out{{"runs", run_array}, {"aggregate", aggregate}};
        if (!warnings.empty()) out["warnings"] = warnings;
        return out;
    }
};

// Selects round-half-up(fraction * |sources|) training sources uniformly at
// random with the run-indexed generator. Errors when the rounded count falls
// below 2 (training pairs need two distinct sources) or leaves no test
// source.
inline std::set<std::string> sd_split(const Corpus& corpus, double fraction,
                                      std::uint64_t seed, int run_index) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw error("training fraction must be in (0, 1)");
    const std::vector<std::string> sources(corpus.sources().begin(),
                                           corpus.sources().end());
    if (sources.size() < 3)
        throw error("single-domain evaluation needs at least 3 sources, got " +
                    std::to_string(sources.size()));
    const std::size_t k = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(sources.size()) + 0.5));
    if (k < 2)
        throw error("training fraction " + std::to_string(fraction) +
                    " selects fewer than 2 of " +
                    std::to_string(sources.size()) +
                    " sources; use a larger fraction");
    if (k >= sources.size())
        throw error("training fraction " + std::to_string(fraction) +
                    " leaves no test sources; use a smaller fraction");
    detail::Rng rng(detail::derive_seed(seed, static_cast<std::uint64_t>(run_index), 1));
    std::set<std::string> out;
    for (std::size_t idx : rng.sample_indices(sources.size(), k))
        out.insert(sources[idx]);
    return out;
}

// All positives labeled true plus negative_ratio x |positives| non-matching
// candidates sampled uniformly without replacement. When the pool is too
// small, every available negative is taken and *exhausted is set.
inline std::vector<LabeledPair> sample_training_pairs(
    const std::set<RefPair>& positives, const std::vector<RefPair>& candidates,
    int negative_ratio, std::uint64_t seed, bool* exhausted = nullptr) {
    if (positives.empty()) throw error("no positive training pairs");
    if (negative_ratio < 1) throw error("negative ratio must be positive");
    if (exhausted) *exhausted = false;

    std::vector<RefPair> pool;
    pool.reserve(candidates.size());
    for (const auto& pair : candidates)
        if (!positives.count(pair)) pool.push_back(pair);

    std::size_t want =
        positives.size() * static_cast<std::size_t>(negative_ratio);
    if (want > pool.size()) {
        want = pool.size();
        if (exhausted) *exhausted = true;
    }

    std::vector<LabeledPair> out;
    out.reserve(positives.size() + want);
    for (const auto& pair : positives)
        out.push_back({pair.first, pair.second, true});
    detail::Rng rng(seed);
    for (std::size_t idx : rng.sample_indices(pool.size(), want))
        out.push_back({pool[idx].first, pool[idx].second, false});
    return out;
}

// Confusion counts over the scoped part of the graph: TP = matched and in
// truth, FP = matched only, FN = in truth but unmatched. With an empty truth
// and no predicted matches both precision and recall are 1.
inline RunRecord evaluate_graph(const SimilarityGraph& graph,
                                const std::set<RefPair>& truth,
                                const std::set<RefPair>& scope) {
    RunRecord r;
    for (const auto& e : graph.edges) {
        RefPair pair = canonical_pair(e.a, e.b);
        if (!scope.count(pair)) continue;
        const bool is_true = truth.count(pair) > 0;
        if (e.match && is_true)
            ++r.tp;
        else if (e.match)
            ++r.fp;
        else if (is_true)
            ++r.fn;
    }
    const std::size_t predicted = r.tp + r.fp;
    const std::size_t actual = r.tp + r.fn;
    r.precision = predicted > 0 ? static_cast<double>(r.tp) /
                                      static_cast<double>(predicted)
                                : (actual == 0 ? 1.0 : 0.0);
    r.recall = actual > 0
                   ? static_cast<double>(r.tp) / static_cast<double>(actual)
                   : 1.0;
    r.f1 = r.precision + r.recall > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
}

namespace detail {

// Scores the given pairs with the model; emits edges in input (canonical)
// order regardless of job count.
inline SimilarityGraph score_pairs(
    const std::vector<RefPair>& pairs,
    const std::map<PropertyRef, std::vector<double>>& features,
    const ClassifierModel& model, double threshold, unsigned jobs) {
    SimilarityGraph graph;
    graph.edges.resize(pairs.size());
    parallel_chunks(pairs.size(), jobs, [&](std::size_t begin,
                                            std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& [a, b] = pairs[i];
            const std::vector<double> pf =
                pair_features(features.at(a), features.at(b), a.name, b.name);
            const Prediction pred = model.predict(pf);
            graph.edges[i] = {a, b, pred.score, pred.score >= threshold};
        }
    });
    return graph;
}

inline std::vector<TrainingExample> examples_from_pairs(
    const std::vector<LabeledPair>& pairs,
    const std::map<PropertyRef, std::vector<double>>& features) {
    std::vector<TrainingExample> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        const auto fa = features.find(p.a);
        const auto fb = features.find(p.b);
        if (fa == features.end() || fb == features.end()) {
            const PropertyRef& missing = fa == features.end() ? p.a : p.b;
            throw error("labeled pair references a property absent from the "
                        "corpus: (" +
                        missing.source + ", " + missing.cls + ", " +
                        missing.name + ")");
        }
        out.push_back({pair_features(fa->second, fb->second, p.a.name,
                                     p.b.name),
                       p.label});
    }
    return out;
}

}  // namespace detail

// Single-domain regime: per repetition, split sources, sample 2:1 training
// pairs from pairs fully inside the training sources, train, then score and
// evaluate every remaining candidate pair (unsampled unless sample_test).
inline EvalReport run_sd(const Corpus& corpus, const AlignmentTable& alignments,
                         const EmbeddingTable& table, const SDConfig& config,
                         const TrainingSchedule& schedule, unsigned jobs = 1) {
    if (config.repetitions < 1) throw error("repetitions must be positive");
    const std::vector<RefPair> candidates = candidate_pairs(corpus);
    detail::check_candidate_cap(candidates.size());
    const std::set<RefPair> truth = ground_truth_pairs(alignments, corpus);
    const auto features = compute_property_features(corpus, table, jobs);

    EvalReport report;
    for (int run = 0; run < config.repetitions; ++run) {
        const std::set<std::string> train_sources =
            sd_split(corpus, config.training_fraction, config.seed, run);
        auto in_train = [&](const RefPair& p) {
            return train_sources.count(p.first.source) > 0 &&
                   train_sources.count(p.second.source) > 0;
        };
        std::vector<RefPair> train_candidates;
        std::vector<RefPair> test_candidates;
        for (const auto& pair : candidates)
            (in_train(pair) ? train_candidates : test_candidates).push_back(pair);

        std::set<RefPair> train_positives;
        for (const auto& pair : train_candidates)
            if (truth.count(pair)) train_positives.insert(pair);
        if (train_positives.empty())
            throw error("run " + std::to_string(run) +
                        ": no positive pairs among training sources");

        bool exhausted = false;
        const std::vector<LabeledPair> labeled = sample_training_pairs(
            train_positives, train_candidates, config.negative_ratio,
            detail::derive_seed(config.seed, static_cast<std::uint64_t>(run), 2),
            &exhausted);
        if (exhausted)
            report.warnings.push_back(
                "run " + std::to_string(run) +
                ": negative pool exhausted before reaching the ratio");

        const ClassifierModel model = train(
            detail::examples_from_pairs(labeled, features), schedule,
            detail::derive_seed(config.seed, static_cast<std::uint64_t>(run), 3));

        const SimilarityGraph graph =
            detail::score_pairs(test_candidates, features, model, 0.5, jobs);

        std::set<RefPair> scope(test_candidates.begin(),
                                test_candidates.end());
        if (config.sample_test) {
            std::set<RefPair> test_positives;
            for (const auto& pair : test_candidates)
                if (truth.count(pair)) test_positives.insert(pair);
            const std::vector<LabeledPair> sampled = sample_training_pairs(
                test_positives, test_candidates, config.negative_ratio,
                detail::derive_seed(config.seed,
                                    static_cast<std::uint64_t>(run), 4));
            scope.clear();
            for (const auto& p : sampled)
                scope.insert(canonical_pair(p.a, p.b));
        }

        RunRecord record = evaluate_graph(graph, truth, scope);
        record.run_index = run;
        record.train_sources.assign(train_sources.begin(),
                                    train_sources.end());
        report.runs.push_back(std::move(record));
    }
    report.finalize();
    return report;
}

// Transfer regime: pool 2:1-sampled training pairs from every training
// corpus, train one model, then score and evaluate every candidate pair of
// the test corpus.
inline EvalReport run_tl(
    const std::vector<std::pair<const Corpus*, const AlignmentTable*>>& train_sets,
    const Corpus& test_corpus, const AlignmentTable& test_alignments,
    const EmbeddingTable& table, const TrainingSchedule& schedule,
    std::uint64_t seed, int negative_ratio = 2, unsigned jobs = 1) {
    if (train_sets.empty()) throw error("transfer run needs >= 1 training corpus");
    EvalReport report;
    std::vector<TrainingExample> pooled;
    std::set<std::string> train_source_union;
    for (std::size_t i = 0; i < train_sets.size(); ++i) {
        const Corpus& corpus = *train_sets[i].first;
        if (corpus.fingerprint() == test_corpus.fingerprint())
            throw error("training corpus " + std::to_string(i) +
                        " is identical to the test corpus");
        const std::vector<RefPair> candidates = candidate_pairs(corpus);
        detail::check_candidate_cap(candidates.size());
        const std::set<RefPair> truth =
            ground_truth_pairs(*train_sets[i].second, corpus);
        if (truth.empty())
            throw error("training corpus " + std::to_string(i) +
                        " has no positive pairs");
        bool exhausted = false;
        const std::vector<LabeledPair> labeled = sample_training_pairs(
            truth, candidates, negative_ratio,
            detail::derive_seed(seed, i, 5), &exhausted);
        if (exhausted)
            report.warnings.push_back(
                "training corpus " + std::to_string(i) +
                ": negative pool exhausted before reaching the ratio");
        const auto features = compute_property_features(corpus, table, jobs);
        for (auto& ex : detail::examples_from_pairs(labeled, features))
            pooled.push_back(std::move(ex));
        for (const auto& s : corpus.sources()) train_source_union.insert(s);
    }

    const ClassifierModel model =
        train(pooled, schedule, detail::derive_seed(seed, 0, 6));

    const std::vector<RefPair> test_pairs = candidate_pairs(test_corpus);
    detail::check_candidate_cap(test_pairs.size());
    const auto test_features =
        compute_property_features(test_corpus, table, jobs);
    const SimilarityGraph graph =
        detail::score_pairs(test_pairs, test_features, model, 0.5, jobs);
    const std::set<RefPair> truth =
        ground_truth_pairs(test_alignments, test_corpus);
    const std::set<RefPair> scope(test_pairs.begin(), test_pairs.end());

    RunRecord record = evaluate_graph(graph, truth, scope);
    record.run_index = 0;
    record.train_sources.assign(train_source_union.begin(),
                                train_source_union.end());
    report.runs.push_back(std::move(record));
    report.finalize();
    return report;
}

inline void write_report_json(const std::string& path, const EvalReport& report,
                              const nlohmann::json& metadata) {
    std::ofstream out = detail::open_output(path);
    nlohmann::json doc = report.to_json();
    doc["metadata"] = metadata;
    out << doc.dump(2) << '\n';
    if (!out) throw error("failed writing report: " + path);
}

inline void write_report_csv(const std::string& path, const EvalReport& report,
                             std::optional<double> fraction) {
    std::ofstream out = detail::open_output(path);
    out << "run_id,fraction,tp,fp,fn,precision,recall,f1\n";
    for (const auto& r : report.runs) {
        out << r.run_index << ',';
        if (fraction) out << nlohmann::json(*fraction).dump();
        out << ',' << r.tp << ',' << r.fp << ',' << r.fn << ','
            << nlohmann::json(r.precision).dump() << ','
            << nlohmann::json(r.recall).dump() << ','
            << nlohmann::json(r.f1).dump() << '\n';
    }
    if (!out) throw error("failed writing csv report: " + path);
}

}  // namespace propmatch
