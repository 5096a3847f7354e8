// Acceptance suite: one criterion per check, one PASS/FAIL line each.
// Usage: acceptance_tests [path-to-propmatch-cli]
// The paper-scale reproduction check only runs when the external dataset is
// configured via PROPMATCH_CAMERA_CORPUS / PROPMATCH_CAMERA_ALIGNMENTS /
// PROPMATCH_EMBEDDINGS; otherwise it is reported as SKIP and does not fail
// the suite.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "propmatch/propmatch.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "support/tempdir.hpp"

namespace {

using namespace propmatch;

std::string g_cli_path;

struct Outcome {
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

double seconds_since(
    const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string random_name(propmatch::detail::Rng& rng) {
    static const std::string alphabet = "abcdefghij ";
    std::string s;
    const std::size_t len = rng.next_index(16);
    for (std::size_t i = 0; i < len; ++i)
        s.push_back(alphabet[rng.next_index(alphabet.size())]);
    return s;
}

double best_threshold_f1(const SimilarityGraph& graph,
                         const std::set<RefPair>& truth,
                         const std::set<RefPair>& scope) {
    double best = 0.0;
    for (int i = 1; i <= 19; ++i) {
        const double threshold = 0.05 * i;
        SimilarityGraph at = graph;
        for (auto& e : at.edges) e.match = e.score >= threshold;
        best = std::max(best, evaluate_graph(at, truth, scope).f1);
    }
    return best;
}

// --- criteria ---------------------------------------------------------------

Outcome dimension_fidelity() {
    const auto start = std::chrono::steady_clock::now();
    std::vector<PropertyInstance> instances = {
        {"s1", "camera", "e1", "megapixel", "12 MP"},
        {"s1", "camera", "e1", "weight", "450 g"},
        {"s1", "camera", "e2", "megapixel", ""},
        {"s2", "camera", "e1", "mp", "16mp"},
        {"s2", "camera", "e1", "mass", "0.5 kg"},
        {"s3", "camera", "e1", "resolution", "8 megapixels"},
        {"s3", "camera", "e1", "code", "dw-830"},
    };
    const Corpus corpus = Corpus::from_instances(instances);
    const EmbeddingTable table = synthetic::make_vocabulary().table();

    for (const auto& [ref, values] : corpus.index())
        for (const auto& v : values)
            if (instance_features(v, table).size() != 329)
                return {false, false, "instance vector size mismatch"};
    std::map<PropertyRef, std::vector<double>> features;
    for (const auto& ref : corpus.refs()) {
        features[ref] = property_features(ref, corpus, table);
        if (features[ref].size() != 629)
            return {false, false, "property vector size mismatch"};
    }
    std::size_t pairs = 0;
    for (const auto& [a, b] : candidate_pairs(corpus)) {
        if (pair_features(features[a], features[b], a.name, b.name).size() !=
            637)
            return {false, false, "pair vector size mismatch"};
        ++pairs;
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 1.0)
        return {false, false, "took " + std::to_string(elapsed) + "s"};
    return {true, false,
            "329/629/637 over " + std::to_string(corpus.index().size()) +
                " properties, " + std::to_string(pairs) + " pairs"};
}

Outcome paper_example_fidelity() {
    const auto f = instance_meta_features("12 MP");
    if (f[1] != 2.0) return {false, false, "digit count != 2"};
    if (f[5] != 1.0) return {false, false, "whitespace count != 1"};
    if (f[8] != 0.4) return {false, false, "letter fraction != 0.4"};
    return {true, false, "digits 2, whitespace 1, letter fraction 0.4"};
}

Outcome gradient_correctness() {
    const auto start = std::chrono::steady_clock::now();
    const double err = gradient_check(0);
    const double elapsed = seconds_since(start);
    if (err > 1e-4)
        return {false, false, "max relative error " + std::to_string(err)};
    if (elapsed >= 10.0)
        return {false, false, "took " + std::to_string(elapsed) + "s"};
    std::ostringstream ss;
    ss << "max relative error " << err;
    return {true, false, ss.str()};
}

Outcome symmetry() {
    const synthetic::Vocabulary vocab = synthetic::make_vocabulary();
    const EmbeddingTable table = vocab.table();
    const synthetic::Dataset ds = synthetic::camera_domain();
    const Corpus corpus = ds.corpus();
    const auto features = compute_property_features(corpus, table, 2);
    const auto truth = ground_truth_pairs(ds.table(), corpus);
    const auto labeled = sample_training_pairs(
        truth, candidate_pairs(corpus), 2, 21);
    const ClassifierModel model =
        train(propmatch::detail::examples_from_pairs(labeled, features),
              TrainingSchedule::defaults(), 21);

    propmatch::detail::Rng rng(777);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> pa(kPropertyFeatureCount), pb(kPropertyFeatureCount);
        for (double& v : pa) v = rng.next_real(-2.0, 2.0);
        for (double& v : pb) v = rng.next_real(-2.0, 2.0);
        const std::string na = random_name(rng), nb = random_name(rng);
        const auto ab = pair_features(pa, pb, na, nb);
        const auto ba = pair_features(pb, pa, nb, na);
        if (ab != ba)
            return {false, false, "pair features differ under swap at " +
                                      std::to_string(i)};
        if (model.predict(ab).score != model.predict(ba).score)
            return {false, false,
                    "scores differ under swap at " + std::to_string(i)};
    }
    return {true, false, "1000 random pairs identical under swap"};
}

Outcome determinism() {
    if (g_cli_path.empty())
        return {false, false, "cli path not provided"};
    testsupport::TempDir dir;
    const synthetic::Dataset ds = synthetic::camera_domain();
    synthetic::write_instances_jsonl(dir.file("corpus.jsonl"), ds);
    synthetic::write_alignments_jsonl(dir.file("align.jsonl"), ds);
    synthetic::make_vocabulary().write(dir.file("vectors.txt"));

    auto run = [&](const std::string& out, int jobs) {
        std::ostringstream cmd;
        cmd << g_cli_path << " eval-sd"
            << " --corpus " << dir.file("corpus.jsonl")
            << " --alignments " << dir.file("align.jsonl")
            << " --embeddings " << dir.file("vectors.txt")
            << " --fraction 0.4 --repetitions 3 --seed 42"
            << " --jobs " << jobs << " --out " << out << " 2> /dev/null";
        return std::system(cmd.str().c_str());
    };
    if (run(dir.file("r1.json"), 1) != 0)
        return {false, false, "first eval-sd run failed"};
    if (run(dir.file("r2.json"), 1) != 0)
        return {false, false, "second eval-sd run failed"};
    if (run(dir.file("r8.json"), 8) != 0)
        return {false, false, "jobs-8 eval-sd run failed"};

    const std::string r1 = read_file(dir.file("r1.json"));
    if (r1.empty()) return {false, false, "empty report"};
    if (r1 != read_file(dir.file("r2.json")))
        return {false, false, "repeat run differs byte-wise"};
    if (r1 != read_file(dir.file("r8.json")))
        return {false, false, "--jobs 8 differs from --jobs 1"};
    return {true, false, "byte-identical across repeats and job counts"};
}

Outcome string_metric_oracle() {
    propmatch::detail::Rng rng(987);
    for (int i = 0; i < 1000; ++i) {
        const std::string a = random_name(rng).substr(0, 20);
        const std::string b = random_name(rng).substr(0, 20);
        const std::string la(propmatch::detail::lowercase(
            propmatch::detail::trim(a)));
        const std::string lb(propmatch::detail::lowercase(
            propmatch::detail::trim(b)));
        const std::size_t max_len = std::max(la.size(), lb.size());
        const double expected =
            max_len == 0
                ? 1.0
                : 1.0 - static_cast<double>(oracles::edit_distance(la, lb)) /
                            static_cast<double>(max_len);
        if (string_similarities(a, b)[0] != expected)
            return {false, false,
                    "mismatch on pair " + std::to_string(i) + " (\"" + a +
                        "\", \"" + b + "\")"};
    }
    return {true, false, "1000 random pairs agree exactly with the DP oracle"};
}

Outcome minhash_estimator() {
    propmatch::detail::Rng rng(55);
    double total = 0.0, worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        // two sets of size 60 with controlled overlap; sizes >= 50
        const std::size_t overlap = 10 + rng.next_index(50);
        std::set<std::string> pool;
        while (pool.size() < 120) {
            std::string s;
            for (int i = 0; i < 10; ++i)
                s.push_back(static_cast<char>('a' + rng.next_index(26)));
            pool.insert(s);
        }
        std::vector<std::string> items(pool.begin(), pool.end());
        const std::set<std::string> a(items.begin(), items.begin() + 60);
        const std::set<std::string> b(items.begin() + 60 - overlap,
                                      items.begin() + 120 - overlap);
        const double exact = oracles::jaccard(a, b);
        const double est = minhash_agreement(
            minhash_signature(a, 500, 1000 + trial),
            minhash_signature(b, 500, 1000 + trial));
        const double err = std::abs(est - exact);
        total += err;
        worst = std::max(worst, err);
    }
    const double mean = total / 100.0;
    std::ostringstream ss;
    ss << "mean |error| " << mean << ", max " << worst;
    if (mean > 0.05 || worst > 0.15) return {false, false, ss.str()};
    return {true, false, ss.str()};
}

Outcome synthetic_sd() {
    const auto start = std::chrono::steady_clock::now();
    const synthetic::Vocabulary vocab = synthetic::make_vocabulary();
    const EmbeddingTable table = vocab.table();
    const synthetic::Dataset ds = synthetic::camera_domain();
    const Corpus corpus = ds.corpus();
    const AlignmentTable alignments = ds.table();

    SDConfig config;
    config.training_fraction = 0.4;
    config.repetitions = 5;
    config.seed = 11;
    const EvalReport report = run_sd(corpus, alignments, table, config,
                                     TrainingSchedule::defaults(), 2);

    const auto truth = ground_truth_pairs(alignments, corpus);
    const auto cands = candidate_pairs(corpus);
    const std::set<RefPair> scope(cands.begin(), cands.end());
    const double cosine_best =
        best_threshold_f1(cosine_match(corpus, table, 0.5), truth, scope);
    const double minhash_best =
        best_threshold_f1(minhash_match(corpus, 500, 0, 0.5), truth, scope);

    const double elapsed = seconds_since(start);
    std::ostringstream ss;
    ss << "mean F1 " << report.f1.mean << " vs cosine " << cosine_best
       << ", minhash " << minhash_best << " (" << elapsed << "s)";
    if (report.f1.mean < 0.95) return {false, false, ss.str()};
    if (report.f1.mean < cosine_best + 0.05) return {false, false, ss.str()};
    if (report.f1.mean < minhash_best + 0.05) return {false, false, ss.str()};
    if (elapsed >= 180.0) return {false, false, ss.str()};
    return {true, false, ss.str()};
}

Outcome synthetic_tl() {
    const auto start = std::chrono::steady_clock::now();
    const synthetic::Vocabulary vocab = synthetic::make_vocabulary();
    const EmbeddingTable table = vocab.table();
    const synthetic::Dataset cam = synthetic::camera_domain();
    const synthetic::Dataset tv = synthetic::tv_domain();
    const Corpus cam_corpus = cam.corpus();
    const Corpus tv_corpus = tv.corpus();
    const AlignmentTable cam_align = cam.table();
    const AlignmentTable tv_align = tv.table();

    const EvalReport report =
        run_tl({{&cam_corpus, &cam_align}}, tv_corpus, tv_align, table,
               TrainingSchedule::defaults(), 13, 2, 2);
    const double elapsed = seconds_since(start);
    std::ostringstream ss;
    ss << "transfer F1 " << report.runs[0].f1 << " (" << elapsed << "s)";
    if (report.runs[0].f1 < 0.8) return {false, false, ss.str()};
    if (elapsed >= 180.0) return {false, false, ss.str()};
    return {true, false, ss.str()};
}

Outcome negative_sampling() {
    std::set<RefPair> positives;
    std::vector<RefPair> candidates;
    for (int i = 0; i < 400; ++i) {
        const RefPair p = canonical_pair(
            {"sa", "c", "p" + std::to_string(i)},
            {"sb", "c", "q" + std::to_string(i)});
        candidates.push_back(p);
        if (i < 50) positives.insert(p);
    }
    const auto labeled = sample_training_pairs(positives, candidates, 2, 3);
    std::size_t negatives = 0;
    for (const auto& p : labeled) negatives += p.label ? 0 : 1;
    if (labeled.size() != 150 || negatives != 100)
        return {false, false,
                std::to_string(negatives) + " negatives of " +
                    std::to_string(labeled.size()) + " pairs"};
    return {true, false, "50 positives produced exactly 100 negatives"};
}

Outcome paper_scale_reproduction() {
    const char* corpus_path = std::getenv("PROPMATCH_CAMERA_CORPUS");
    const char* align_path = std::getenv("PROPMATCH_CAMERA_ALIGNMENTS");
    const char* vectors_path = std::getenv("PROPMATCH_EMBEDDINGS");
    if (!corpus_path || !align_path || !vectors_path)
        return {true, true,
                "external camera dataset not configured; set "
                "PROPMATCH_CAMERA_CORPUS, PROPMATCH_CAMERA_ALIGNMENTS, "
                "PROPMATCH_EMBEDDINGS to run"};

    const Corpus corpus = load_corpus(corpus_path, 100);
    const AlignmentTable alignments = load_alignments(align_path);
    std::unordered_set<std::string> allow;
    for (const auto& [ref, values] : corpus.index()) {
        for (const auto& t : tokenize(ref.name)) allow.insert(t);
        for (const auto& v : values)
            for (const auto& t : tokenize(v)) allow.insert(t);
    }
    const EmbeddingTable table =
        load_embeddings(vectors_path, kEmbeddingDimension, &allow);

    SDConfig config;
    config.training_fraction = 0.8;
    config.repetitions = 5;
    config.seed = 0;
    const EvalReport report = run_sd(corpus, alignments, table, config,
                                     TrainingSchedule::defaults(), 2);
    std::ostringstream ss;
    ss << "mean F1 " << report.f1.mean << " at fraction 0.8";
    return {report.f1.mean >= 0.90, false, ss.str()};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];
    if (g_cli_path.empty())
        if (const char* env = std::getenv("PROPMATCH_BIN")) g_cli_path = env;

    const std::vector<std::pair<std::string, std::function<Outcome()>>>
        criteria = {
            {"dimension-fidelity", dimension_fidelity},
            {"paper-example-fidelity", paper_example_fidelity},
            {"gradient-correctness", gradient_correctness},
            {"symmetry", symmetry},
            {"determinism", determinism},
            {"string-metric-oracle", string_metric_oracle},
            {"minhash-estimator", minhash_estimator},
            {"synthetic-sd", synthetic_sd},
            {"synthetic-tl", synthetic_tl},
            {"negative-sampling", negative_sampling},
            {"paper-scale-reproduction", paper_scale_reproduction},
        };

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome outcome;
        try {
            outcome = fn();
        } catch (const std::exception& e) {
            outcome = {false, false, std::string("exception: ") + e.what()};
        }
        const char* verdict =
            outcome.skipped ? "SKIP" : (outcome.pass ? "PASS" : "FAIL");
        std::cout << verdict << "  " << name;
        if (!outcome.detail.empty()) std::cout << ": " << outcome.detail;
        std::cout << "\n";
        if (!outcome.pass && !outcome.skipped) ++failures;
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance criteria satisfied\n";
    return 0;
}
