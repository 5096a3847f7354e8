// propmatch: multi-source property matching from the command line.
//
// One binary with subcommands so reproduction scripts stay simple. All
// progress goes to stderr, all data to files or stdout; every output embeds
// a reproducibility block (subcommand, flags, seeds, input fingerprints).

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "propmatch/propmatch.hpp"

namespace {

using nlohmann::json;

// Flags that can influence results are recorded; --jobs is deliberately not
// (outputs are byte-identical for any job count).
struct Reproducibility {
    std::string command;
    json flags = json::object();
    json inputs = json::object();

    void flag(const std::string& name, const json& value) {
        flags[name] = value;
    }
    void input(const std::string& path) {
        inputs[path] =
            propmatch::detail::to_hex(propmatch::detail::file_fingerprint(path));
    }
    json block() const {
        return {{"command", command}, {"flags", flags}, {"inputs", inputs}};
    }
};

std::unordered_set<std::string> corpus_tokens(const propmatch::Corpus& corpus) {
    std::unordered_set<std::string> tokens;
    for (const auto& [ref, values] : corpus.index()) {
        for (const auto& t : propmatch::tokenize(ref.name)) tokens.insert(t);
        for (const auto& v : values)
            for (const auto& t : propmatch::tokenize(v)) tokens.insert(t);
    }
    return tokens;
}

propmatch::EmbeddingTable load_embeddings_for(
    const std::string& path, const std::vector<const propmatch::Corpus*>& corpora,
    bool prune) {
    std::unordered_set<std::string> allow;
    if (prune)
        for (const auto* corpus : corpora)
            for (const auto& t : corpus_tokens(*corpus)) allow.insert(t);
    std::cerr << "loading embeddings from " << path
              << (prune ? " (pruned to corpus vocabulary)" : "") << "\n";
    const propmatch::EmbeddingTable table = propmatch::load_embeddings(
        path, propmatch::kEmbeddingDimension, prune ? &allow : nullptr);
    std::cerr << "embedding table: " << table.size() << " tokens, dimension "
              << table.dimension() << "\n";
    return table;
}

propmatch::TrainingSchedule parse_schedule(const std::string& spec,
                                           int batch_size) {
    propmatch::TrainingSchedule schedule;
    schedule.batch_size = batch_size;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        std::size_t comma = spec.find(',', pos);
        if (comma == std::string::npos) comma = spec.size();
        const std::string stage = spec.substr(pos, comma - pos);
        const std::size_t colon = stage.find(':');
        if (colon == std::string::npos)
            throw propmatch::error("bad schedule stage \"" + stage +
                                   "\"; expected EPOCHS:LEARNING_RATE");
        try {
            schedule.stages.push_back(
                {std::stoi(stage.substr(0, colon)),
                 std::stod(stage.substr(colon + 1))});
        } catch (const std::exception&) {
            throw propmatch::error("bad schedule stage \"" + stage + "\"");
        }
        if (schedule.stages.back().epochs <= 0 ||
            schedule.stages.back().learning_rate <= 0.0)
            throw propmatch::error("schedule stages need positive epochs and "
                                   "learning rate");
        pos = comma + 1;
    }
    if (schedule.stages.empty()) throw propmatch::error("empty schedule");
    return schedule;
}

void write_json_out(const std::optional<std::string>& path, const json& doc) {
    if (path) {
        std::ofstream out = propmatch::detail::open_output(*path);
        out << doc.dump(2) << '\n';
    } else {
        std::cout << doc.dump(2) << '\n';
    }
}

struct CommonOptions {
    std::optional<std::size_t> entity_cap;
    unsigned jobs = 1;
    bool no_prune = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_prune = false) {
    cmd->add_option("--entity-cap", opts.entity_cap,
                    "Keep only the first N distinct entities per (source, class)");
    cmd->add_option("--jobs", opts.jobs, "Worker threads (never changes output)")
        ->check(CLI::Range(1u, 256u));
    if (with_prune)
        cmd->add_flag("--no-embedding-prune", opts.no_prune,
                      "Load the full embedding file instead of pruning to the "
                      "corpus vocabulary");
}

int run(int argc, char** argv) {
    CLI::App app{"propmatch: learned multi-source property matching"};
    app.require_subcommand(1);

    // --- ingest -------------------------------------------------------------
    auto* ingest = app.add_subcommand(
        "ingest", "Validate instance/alignment files and print statistics");
    std::vector<std::string> ingest_corpora;
    std::vector<std::string> ingest_alignments;
    std::optional<std::string> ingest_out;
    CommonOptions ingest_opts;
    ingest->add_option("--corpus", ingest_corpora, "Instance JSONL file(s)")
        ->required();
    ingest->add_option("--alignments", ingest_alignments,
                       "Alignment JSONL file(s), one per corpus");
    ingest->add_option("--out", ingest_out, "Write statistics JSON here");
    add_common(ingest, ingest_opts);

    // --- featurize ----------------------------------------------------------
    auto* featurize = app.add_subcommand(
        "featurize", "Export property or pair feature vectors");
    std::string fz_corpus, fz_embeddings, fz_level = "property";
    std::optional<std::string> fz_out, fz_matrix, fz_index_map;
    CommonOptions fz_opts;
    featurize->add_option("--corpus", fz_corpus, "Instance JSONL file")
        ->required();
    featurize->add_option("--embeddings", fz_embeddings, "Word vector file")
        ->required();
    featurize->add_option("--level", fz_level, "property or pair")
        ->check(CLI::IsMember({"property", "pair"}));
    featurize->add_option("--out", fz_out, "Feature JSONL output");
    featurize->add_option("--matrix", fz_matrix, "Binary feature matrix output");
    featurize->add_option("--index-map", fz_index_map,
                          "Write the feature index map JSON here");
    add_common(featurize, fz_opts, true);

    // --- train ----------------------------------------------------------------
    auto* train_cmd = app.add_subcommand(
        "train", "Train the pair classifier and write a model file");
    std::string tr_corpus, tr_alignments, tr_embeddings, tr_model_out;
    std::optional<std::string> tr_pairs_in, tr_pairs_out;
    std::uint64_t tr_seed = 0;
    int tr_ratio = 2, tr_batch = 32;
    std::string tr_schedule = "10:1e-3,5:1e-4,5:1e-5";
    CommonOptions tr_opts;
    train_cmd->add_option("--corpus", tr_corpus, "Instance JSONL file")
        ->required();
    train_cmd->add_option("--alignments", tr_alignments,
                          "Alignment JSONL file (ignored with --pairs-in)");
    train_cmd->add_option("--embeddings", tr_embeddings, "Word vector file")
        ->required();
    train_cmd->add_option("--model-out", tr_model_out, "Model file to write")
        ->required();
    train_cmd->add_option("--pairs-in", tr_pairs_in,
                          "Train from an explicit labeled-pair JSONL file");
    train_cmd->add_option("--pairs-out", tr_pairs_out,
                          "Export the sampled labeled pairs");
    train_cmd->add_option("--seed", tr_seed, "Training seed");
    train_cmd->add_option("--negative-ratio", tr_ratio,
                          "Sampled negatives per positive")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--schedule", tr_schedule,
                          "Stages EPOCHS:LR[,EPOCHS:LR...]");
    train_cmd->add_option("--batch-size", tr_batch, "Mini-batch size")
        ->check(CLI::PositiveNumber);
    add_common(train_cmd, tr_opts, true);

    // --- match ----------------------------------------------------------------
    auto* match_cmd = app.add_subcommand(
        "match", "Score all candidate pairs with a trained model");
    std::string mt_corpus, mt_embeddings, mt_model, mt_out;
    std::optional<std::string> mt_clusters;
    double mt_threshold = 0.5;
    CommonOptions mt_opts;
    match_cmd->add_option("--corpus", mt_corpus, "Instance JSONL file")
        ->required();
    match_cmd->add_option("--embeddings", mt_embeddings, "Word vector file")
        ->required();
    match_cmd->add_option("--model", mt_model, "Trained model file")
        ->required();
    match_cmd->add_option("--out", mt_out, "Similarity graph output")
        ->required();
    match_cmd->add_option("--threshold", mt_threshold, "Match threshold");
    match_cmd->add_option("--clusters", mt_clusters,
                          "Also write connected components here");
    add_common(match_cmd, mt_opts, true);

    // --- baseline ---------------------------------------------------------------
    auto* baseline = app.add_subcommand(
        "baseline", "Run an unsupervised reference matcher");
    std::string bl_mode, bl_corpus, bl_out;
    std::optional<std::string> bl_embeddings;
    double bl_threshold = 0.5;
    int bl_k = 500;
    std::uint64_t bl_seed = 0;
    CommonOptions bl_opts;
    baseline->add_option("mode", bl_mode, "cosine or minhash")
        ->required()
        ->check(CLI::IsMember({"cosine", "minhash"}));
    baseline->add_option("--corpus", bl_corpus, "Instance JSONL file")
        ->required();
    baseline->add_option("--embeddings", bl_embeddings,
                         "Word vector file (cosine mode)");
    baseline->add_option("--out", bl_out, "Similarity graph output")
        ->required();
    baseline->add_option("--threshold", bl_threshold, "Match threshold");
    baseline->add_option("--k", bl_k, "Minhash functions")
        ->check(CLI::PositiveNumber);
    baseline->add_option("--seed", bl_seed, "Minhash seed");
    add_common(baseline, bl_opts, true);

    // --- eval-sd ---------------------------------------------------------------
    auto* eval_sd = app.add_subcommand(
        "eval-sd", "Single-domain evaluation with source splits");
    std::string sd_corpus, sd_alignments, sd_embeddings, sd_out;
    std::optional<std::string> sd_csv;
    double sd_fraction = 0.2;
    int sd_reps = 25, sd_ratio = 2, sd_batch = 32;
    std::uint64_t sd_seed = 0;
    bool sd_sample_test = false;
    std::string sd_schedule = "10:1e-3,5:1e-4,5:1e-5";
    CommonOptions sd_opts;
    eval_sd->add_option("--corpus", sd_corpus, "Instance JSONL file")
        ->required();
    eval_sd->add_option("--alignments", sd_alignments, "Alignment JSONL file")
        ->required();
    eval_sd->add_option("--embeddings", sd_embeddings, "Word vector file")
        ->required();
    eval_sd->add_option("--out", sd_out, "Report JSON output")->required();
    eval_sd->add_option("--csv", sd_csv, "Also write a per-run CSV here");
    eval_sd->add_option("--fraction", sd_fraction, "Training source fraction")
        ->required();
    eval_sd->add_option("--repetitions", sd_reps, "Independent repetitions")
        ->check(CLI::PositiveNumber);
    eval_sd->add_option("--seed", sd_seed, "Master seed");
    eval_sd->add_option("--negative-ratio", sd_ratio,
                        "Sampled negatives per positive")
        ->check(CLI::PositiveNumber);
    eval_sd->add_flag("--sample-test", sd_sample_test,
                      "Apply the negative ratio to the test scope too");
    eval_sd->add_option("--schedule", sd_schedule,
                        "Stages EPOCHS:LR[,EPOCHS:LR...]");
    eval_sd->add_option("--batch-size", sd_batch, "Mini-batch size")
        ->check(CLI::PositiveNumber);
    add_common(eval_sd, sd_opts, true);

    // --- eval-tl ---------------------------------------------------------------
    auto* eval_tl = app.add_subcommand(
        "eval-tl", "Transfer evaluation: train on other datasets");
    std::vector<std::string> tl_train_corpora, tl_train_alignments;
    std::string tl_test_corpus, tl_test_alignments, tl_embeddings, tl_out;
    std::optional<std::string> tl_csv;
    int tl_ratio = 2, tl_batch = 32;
    std::uint64_t tl_seed = 0;
    std::string tl_schedule = "10:1e-3,5:1e-4,5:1e-5";
    CommonOptions tl_opts;
    eval_tl->add_option("--train-corpus", tl_train_corpora,
                        "Training instance JSONL file(s)")
        ->required();
    eval_tl->add_option("--train-alignments", tl_train_alignments,
                        "Training alignment JSONL file(s), matching order")
        ->required();
    eval_tl->add_option("--test-corpus", tl_test_corpus,
                        "Test instance JSONL file")
        ->required();
    eval_tl->add_option("--test-alignments", tl_test_alignments,
                        "Test alignment JSONL file")
        ->required();
    eval_tl->add_option("--embeddings", tl_embeddings, "Word vector file")
        ->required();
    eval_tl->add_option("--out", tl_out, "Report JSON output")->required();
    eval_tl->add_option("--csv", tl_csv, "Also write a per-run CSV here");
    eval_tl->add_option("--seed", tl_seed, "Master seed");
    eval_tl->add_option("--negative-ratio", tl_ratio,
                        "Sampled negatives per positive")
        ->check(CLI::PositiveNumber);
    eval_tl->add_option("--schedule", tl_schedule,
                        "Stages EPOCHS:LR[,EPOCHS:LR...]");
    eval_tl->add_option("--batch-size", tl_batch, "Mini-batch size")
        ->check(CLI::PositiveNumber);
    add_common(eval_tl, tl_opts, true);

    // --- gradcheck --------------------------------------------------------------
    auto* gradcheck_cmd = app.add_subcommand(
        "gradcheck", "Finite-difference check of the classifier gradients");
    std::uint64_t gc_seed = 0;
    gradcheck_cmd->add_option("--seed", gc_seed, "Harness seed");

    CLI11_PARSE(app, argc, argv);

    if (*ingest) {
        json stats = json::array();
        for (std::size_t i = 0; i < ingest_corpora.size(); ++i) {
            const propmatch::Corpus corpus =
                propmatch::load_corpus(ingest_corpora[i], ingest_opts.entity_cap);
            json entry{{"file", ingest_corpora[i]},
                       {"fingerprint",
                        propmatch::detail::to_hex(corpus.fingerprint())},
                       {"sources", corpus.sources().size()},
                       {"classes", corpus.classes().size()},
                       {"properties", corpus.index().size()},
                       {"instances", corpus.instances().size()},
                       {"candidate_pairs",
                        propmatch::candidate_pairs(corpus).size()}};
            if (i < ingest_alignments.size()) {
                const propmatch::AlignmentTable table =
                    propmatch::load_alignments(ingest_alignments[i]);
                const auto missing =
                    propmatch::alignments_missing_from_corpus(table, corpus);
                for (const auto& ref : missing)
                    std::cerr << "warning: aligned property absent from corpus: ("
                              << ref.source << ", " << ref.cls << ", "
                              << ref.name << ")\n";
                entry["alignments"] = table.size();
                entry["alignments_missing_from_corpus"] = missing.size();
                entry["ground_truth_pairs"] =
                    propmatch::ground_truth_pairs(table, corpus).size();
            }
            stats.push_back(std::move(entry));
        }
        Reproducibility repro;
        repro.command = "ingest";
        if (ingest_opts.entity_cap)
            repro.flag("entity_cap", *ingest_opts.entity_cap);
        for (const auto& p : ingest_corpora) repro.input(p);
        for (const auto& p : ingest_alignments) repro.input(p);
        write_json_out(ingest_out,
                       {{"corpora", stats}, {"metadata", repro.block()}});
        return 0;
    }

    if (*featurize) {
        const propmatch::Corpus corpus =
            propmatch::load_corpus(fz_corpus, fz_opts.entity_cap);
        const propmatch::EmbeddingTable table = load_embeddings_for(
            fz_embeddings, {&corpus}, !fz_opts.no_prune);
        const auto features =
            propmatch::compute_property_features(corpus, table, fz_opts.jobs);
        if (fz_index_map) {
            std::ofstream out = propmatch::detail::open_output(*fz_index_map);
            out << propmatch::feature_index_map().to_json().dump(2) << '\n';
        }
        if (fz_level == "property") {
            if (fz_out)
                propmatch::write_property_features_jsonl(*fz_out, corpus,
                                                         features);
            if (fz_matrix) {
                std::vector<std::vector<double>> rows;
                for (const auto& [ref, values] : corpus.index())
                    rows.push_back(features.at(ref));
                propmatch::write_feature_matrix(
                    *fz_matrix, rows, propmatch::kPropertyFeatureCount);
            }
        } else {
            const auto pairs = propmatch::candidate_pairs(corpus);
            propmatch::detail::check_candidate_cap(pairs.size());
            if (fz_out)
                propmatch::write_pair_features_jsonl(*fz_out, pairs, features);
            if (fz_matrix) {
                std::vector<std::vector<double>> rows;
                for (const auto& [a, b] : pairs)
                    rows.push_back(propmatch::pair_features(
                        features.at(a), features.at(b), a.name, b.name));
                propmatch::write_feature_matrix(*fz_matrix, rows,
                                                propmatch::kPairFeatureCount);
            }
        }
        std::cerr << "featurized " << corpus.index().size() << " properties ("
                  << fz_level << " level)\n";
        return 0;
    }

    if (*train_cmd) {
        const propmatch::Corpus corpus =
            propmatch::load_corpus(tr_corpus, tr_opts.entity_cap);
        const propmatch::EmbeddingTable table = load_embeddings_for(
            tr_embeddings, {&corpus}, !tr_opts.no_prune);
        const propmatch::TrainingSchedule schedule =
            parse_schedule(tr_schedule, tr_batch);
        const auto features =
            propmatch::compute_property_features(corpus, table, tr_opts.jobs);

        std::vector<propmatch::LabeledPair> labeled;
        if (tr_pairs_in) {
            labeled = propmatch::load_labeled_pairs(*tr_pairs_in);
            std::cerr << "loaded " << labeled.size() << " labeled pairs\n";
        } else {
            if (tr_alignments.empty())
                throw propmatch::error(
                    "train needs --alignments (or --pairs-in)");
            const propmatch::AlignmentTable alignments =
                propmatch::load_alignments(tr_alignments);
            const auto truth = propmatch::ground_truth_pairs(alignments, corpus);
            if (truth.empty())
                throw propmatch::error("no ground-truth positive pairs");
            const auto candidates = propmatch::candidate_pairs(corpus);
            bool exhausted = false;
            labeled = propmatch::sample_training_pairs(
                truth, candidates, tr_ratio,
                propmatch::detail::derive_seed(tr_seed, 0, 2), &exhausted);
            if (exhausted)
                std::cerr << "warning: negative pool exhausted before "
                             "reaching the ratio\n";
            std::cerr << "sampled " << labeled.size() << " training pairs ("
                      << truth.size() << " positives)\n";
        }
        if (tr_pairs_out) propmatch::write_labeled_pairs(*tr_pairs_out, labeled);

        const propmatch::ClassifierModel model = propmatch::train(
            propmatch::detail::examples_from_pairs(labeled, features), schedule,
            tr_seed);
        model.save(tr_model_out);
        std::cerr << "model written to " << tr_model_out << " (fingerprint "
                  << propmatch::detail::to_hex(model.fingerprint()) << ")\n";
        return 0;
    }

    if (*match_cmd) {
        const propmatch::Corpus corpus =
            propmatch::load_corpus(mt_corpus, mt_opts.entity_cap);
        const propmatch::ClassifierModel model =
            propmatch::load_model(mt_model);
        const propmatch::EmbeddingTable table = load_embeddings_for(
            mt_embeddings, {&corpus}, !mt_opts.no_prune);
        propmatch::SimilarityGraph graph = propmatch::match_all(
            corpus, table, model, mt_threshold, mt_opts.jobs);
        Reproducibility repro;
        repro.command = "match";
        repro.flag("threshold", mt_threshold);
        if (mt_opts.entity_cap) repro.flag("entity_cap", *mt_opts.entity_cap);
        repro.input(mt_corpus);
        repro.input(mt_embeddings);
        repro.input(mt_model);
        graph.metadata["invocation"] = repro.block();
        propmatch::write_graph(mt_out, graph);
        std::size_t matches = 0;
        for (const auto& e : graph.edges) matches += e.match;
        std::cerr << "scored " << graph.edges.size() << " pairs, " << matches
                  << " matches\n";
        if (mt_clusters)
            propmatch::write_clusters(*mt_clusters,
                                      propmatch::connected_components(graph));
        return 0;
    }

    if (*baseline) {
        const propmatch::Corpus corpus =
            propmatch::load_corpus(bl_corpus, bl_opts.entity_cap);
        propmatch::SimilarityGraph graph;
        Reproducibility repro;
        repro.command = "baseline";
        repro.flag("mode", bl_mode);
        repro.flag("threshold", bl_threshold);
        if (bl_opts.entity_cap) repro.flag("entity_cap", *bl_opts.entity_cap);
        repro.input(bl_corpus);
        if (bl_mode == "cosine") {
            if (!bl_embeddings)
                throw propmatch::error("baseline cosine needs --embeddings");
            const propmatch::EmbeddingTable table = load_embeddings_for(
                *bl_embeddings, {&corpus}, !bl_opts.no_prune);
            graph = propmatch::cosine_match(corpus, table, bl_threshold);
            repro.input(*bl_embeddings);
        } else {
            graph = propmatch::minhash_match(corpus, bl_k, bl_seed,
                                             bl_threshold);
            repro.flag("k", bl_k);
            repro.flag("seed", bl_seed);
        }
        graph.metadata["invocation"] = repro.block();
        propmatch::write_graph(bl_out, graph);
        std::cerr << "baseline " << bl_mode << " wrote "
                  << graph.edges.size() << " edges\n";
        return 0;
    }

    if (*eval_sd) {
        const propmatch::Corpus corpus =
            propmatch::load_corpus(sd_corpus, sd_opts.entity_cap);
        const propmatch::AlignmentTable alignments =
            propmatch::load_alignments(sd_alignments);
        const propmatch::EmbeddingTable table = load_embeddings_for(
            sd_embeddings, {&corpus}, !sd_opts.no_prune);
        propmatch::SDConfig config;
        config.training_fraction = sd_fraction;
        config.repetitions = sd_reps;
        config.seed = sd_seed;
        config.negative_ratio = sd_ratio;
        config.sample_test = sd_sample_test;
        const propmatch::TrainingSchedule schedule =
            parse_schedule(sd_schedule, sd_batch);
        const propmatch::EvalReport report = propmatch::run_sd(
            corpus, alignments, table, config, schedule, sd_opts.jobs);

        Reproducibility repro;
        repro.command = "eval-sd";
        repro.flag("fraction", sd_fraction);
        repro.flag("repetitions", sd_reps);
        repro.flag("seed", sd_seed);
        repro.flag("negative_ratio", sd_ratio);
        repro.flag("sample_test", sd_sample_test);
        repro.flag("schedule", schedule.to_json());
        if (sd_opts.entity_cap) repro.flag("entity_cap", *sd_opts.entity_cap);
        repro.input(sd_corpus);
        repro.input(sd_alignments);
        repro.input(sd_embeddings);
        propmatch::write_report_json(sd_out, report, repro.block());
        if (sd_csv) propmatch::write_report_csv(*sd_csv, report, sd_fraction);
        std::cerr << "eval-sd mean F1 " << report.f1.mean << " over "
                  << report.runs.size() << " runs\n";
        return 0;
    }

    if (*eval_tl) {
        if (tl_train_corpora.size() != tl_train_alignments.size())
            throw propmatch::error(
                "--train-corpus and --train-alignments must pair up");
        std::vector<propmatch::Corpus> train_corpora;
        std::vector<propmatch::AlignmentTable> train_tables;
        for (std::size_t i = 0; i < tl_train_corpora.size(); ++i) {
            train_corpora.push_back(propmatch::load_corpus(
                tl_train_corpora[i], tl_opts.entity_cap));
            train_tables.push_back(
                propmatch::load_alignments(tl_train_alignments[i]));
        }
        const propmatch::Corpus test_corpus =
            propmatch::load_corpus(tl_test_corpus, tl_opts.entity_cap);
        const propmatch::AlignmentTable test_table =
            propmatch::load_alignments(tl_test_alignments);
        std::vector<const propmatch::Corpus*> all = {&test_corpus};
        for (const auto& c : train_corpora) all.push_back(&c);
        const propmatch::EmbeddingTable table =
            load_embeddings_for(tl_embeddings, all, !tl_opts.no_prune);

        std::vector<std::pair<const propmatch::Corpus*,
                              const propmatch::AlignmentTable*>>
            train_sets;
        for (std::size_t i = 0; i < train_corpora.size(); ++i)
            train_sets.emplace_back(&train_corpora[i], &train_tables[i]);
        const propmatch::TrainingSchedule schedule =
            parse_schedule(tl_schedule, tl_batch);
        const propmatch::EvalReport report = propmatch::run_tl(
            train_sets, test_corpus, test_table, table, schedule, tl_seed,
            tl_ratio, tl_opts.jobs);

        Reproducibility repro;
        repro.command = "eval-tl";
        repro.flag("seed", tl_seed);
        repro.flag("negative_ratio", tl_ratio);
        repro.flag("schedule", schedule.to_json());
        if (tl_opts.entity_cap) repro.flag("entity_cap", *tl_opts.entity_cap);
        for (const auto& p : tl_train_corpora) repro.input(p);
        for (const auto& p : tl_train_alignments) repro.input(p);
        repro.input(tl_test_corpus);
        repro.input(tl_test_alignments);
        repro.input(tl_embeddings);
        propmatch::write_report_json(tl_out, report, repro.block());
        if (tl_csv) propmatch::write_report_csv(*tl_csv, report, std::nullopt);
        std::cerr << "eval-tl F1 " << report.f1.mean << "\n";
        return 0;
    }

    if (*gradcheck_cmd) {
        const double max_rel = propmatch::gradient_check(gc_seed);
        std::printf("%.6e\n", max_rel);
        if (max_rel > 1e-4) {
            std::cerr << "gradient check FAILED (max relative error "
                      << max_rel << " > 1e-4)\n";
            return 2;
        }
        std::cerr << "gradient check ok\n";
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const propmatch::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
