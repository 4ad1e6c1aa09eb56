// Command-line front end: train reference classifiers, export attributions
// and oracle vectors, and run the full importance-alignment experiment.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ialign/alignment.hpp"
#include "ialign/attribution.hpp"
#include "ialign/corpus.hpp"
#include "ialign/errors.hpp"
#include "ialign/io.hpp"
#include "ialign/model.hpp"
#include "ialign/oracle.hpp"
#include "ialign/runner.hpp"
#include "ialign/stopwords.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

ialign::StopWordList load_stops(const std::string& path) {
    return path.empty() ? ialign::default_stop_words()
                        : ialign::StopWordList::from_file(path);
}

std::vector<ialign::OracleKind> parse_oracles(const std::vector<std::string>& names) {
    std::vector<ialign::OracleKind> kinds;
    for (const std::string& name : names)
        kinds.push_back(ialign::oracle_kind_from_name(name));
    return kinds;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string corpus_path;
    std::string dev_path;
    std::string out_dir;
    std::string task = "nli_3way";
    std::string arch = "bag_of_embeddings_linear";
    std::string model_id;
    uint64_t seed = 0;
    int epochs = 2;
    double lr = 1.0;
    int batch = 8;
    size_t dim = 32;
    size_t hidden = 32;
};

int cmd_train(const TrainArgs& args) {
    const ialign::Corpus corpus = ialign::load_corpus(args.corpus_path);

    ialign::TrainingConfig config;
    config.task = ialign::task_from_name(args.task);
    config.architecture = ialign::architecture_from_name(args.arch);
    config.seed = args.seed;
    config.epochs = args.epochs;
    config.learning_rate = args.lr;
    config.batch_size = args.batch;
    config.embedding_dim = args.dim;
    config.hidden_dim = args.hidden;
    config.model_id = args.model_id;

    ialign::TrainingMetrics metrics;
    const ialign::Classifier model = ialign::train(corpus, config, &metrics);

    fs::create_directories(args.out_dir);
    const std::string stem = ialign::sanitize_filename(model.model_id);
    const fs::path ckpt_path = fs::path(args.out_dir) / (stem + ".json");
    ialign::save_classifier(model, ckpt_path);

    nlohmann::json j;
    j["model_id"] = model.model_id;
    j["task"] = ialign::task_name(model.task);
    j["architecture"] = ialign::architecture_name(model.architecture);
    j["seed"] = args.seed;
    j["epochs"] = args.epochs;
    j["learning_rate"] = args.lr;
    j["batch_size"] = args.batch;
    j["embedding_dim"] = args.dim;
    j["hidden_dim"] = args.hidden;
    j["corpus_path"] = args.corpus_path;
    j["per_epoch_loss"] = metrics.epoch_mean_loss;
    if (model.num_classes == ialign::kNumLabels) {
        j["train_accuracy"] = ialign::nli_accuracy(model, corpus);
        if (!args.dev_path.empty()) {
            const ialign::Corpus dev = ialign::load_corpus(args.dev_path);
            j["dev_accuracy"] = ialign::nli_accuracy(model, dev);
        }
    }
    const fs::path metrics_path = fs::path(args.out_dir) / (stem + ".metrics.json");
    ialign::atomic_write(metrics_path, ialign::dump_json(j));

    std::printf("wrote %s\n", ckpt_path.string().c_str());
    std::printf("wrote %s\n", metrics_path.string().c_str());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// attribute
// ---------------------------------------------------------------------------

struct AttributeArgs {
    std::string corpus_path;
    std::string model_path;
    std::string out_dir;
    int steps = 256;
    std::string baseline = "zero";
    std::string target = "gold";
    bool wrong_only = false;
    uint64_t seed = 0;
};

int cmd_attribute(const AttributeArgs& args) {
    const ialign::Corpus corpus = ialign::load_corpus(args.corpus_path);
    const ialign::Classifier model = ialign::load_classifier(args.model_path);

    ialign::RunConfig config;
    config.corpus_path = args.corpus_path;
    config.model_paths = {args.model_path};
    config.ig.steps = args.steps;
    config.ig.baseline = ialign::baseline_from_name(args.baseline);
    config.ig.target = ialign::target_from_name(args.target);
    config.seed = args.seed;
    config.wrong_only = args.wrong_only;

    const auto indices = ialign::eligible_indices(corpus, args.wrong_only);
    if (indices.empty())
        std::fprintf(stderr, "warning: no eligible examples after filtering\n");
    const auto attributions =
        ialign::compute_attributions(model, corpus, indices, config.ig);

    fs::create_directories(args.out_dir);
    const fs::path path = fs::path(args.out_dir) /
                          ("attributions_" + ialign::sanitize_filename(model.model_id) +
                           ".jsonl");
    ialign::write_jsonl_artifact(path, ialign::attributions_to_jsonl(attributions),
                                 config, "ialign-attributions-v1");
    std::printf("wrote %s (%zu examples)\n", path.string().c_str(), attributions.size());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

struct OracleArgs {
    std::string corpus_path;
    std::vector<std::string> oracle_names = {"hard"};
    std::string informed_model_path;
    std::string experts_path;
    std::string stopwords_path;
    std::string out_dir;
    int steps = 256;
    std::string baseline = "zero";
    bool wrong_only = false;
    bool self_pairing = false;
    uint64_t seed = 0;
};

int cmd_oracle(const OracleArgs& args) {
    const ialign::Corpus corpus = ialign::load_corpus(args.corpus_path);
    const ialign::StopWordList stops = load_stops(args.stopwords_path);
    const auto kinds = parse_oracles(args.oracle_names);

    ialign::RunConfig config;
    config.corpus_path = args.corpus_path;
    config.informed_model_path = args.informed_model_path;
    config.expert_annotations_path = args.experts_path;
    config.stopwords_path = args.stopwords_path;
    config.oracles = kinds;
    config.ig.steps = args.steps;
    config.ig.baseline = ialign::baseline_from_name(args.baseline);
    config.seed = args.seed;
    config.wrong_only = args.wrong_only;
    config.debug_self_pairing = args.self_pairing;

    const auto indices = ialign::eligible_indices(corpus, args.wrong_only);

    bool wants_text = false;
    for (ialign::OracleKind k : kinds)
        if (k != ialign::OracleKind::expert) wants_text = true;

    std::map<std::string, std::string> pairing;
    if (wants_text) {
        if (args.self_pairing) {
            pairing = ialign::self_pairing(corpus);
        } else {
            ialign::Rng rng = ialign::derive_stream(args.seed, "pairing");
            pairing = ialign::random_pairing(corpus, rng);
        }
    }

    fs::create_directories(args.out_dir);
    auto write_batch = [&](const ialign::OracleBatch& batch) {
        const std::string kind = ialign::oracle_kind_name(batch.kind);
        const fs::path matched = fs::path(args.out_dir) / ("oracle_" + kind + "_matched.jsonl");
        const fs::path random = fs::path(args.out_dir) / ("oracle_" + kind + "_random.jsonl");
        ialign::write_jsonl_artifact(matched, ialign::oracle_vectors_to_jsonl(batch.matched),
                                     config, "ialign-oracles-v1");
        ialign::write_jsonl_artifact(random,
                                     ialign::oracle_vectors_to_jsonl(batch.random_baseline),
                                     config, "ialign-oracles-v1");
        std::printf("wrote %s (%zu examples)\n", matched.string().c_str(),
                    batch.matched.size());
        std::printf("wrote %s\n", random.string().c_str());
    };

    for (ialign::OracleKind kind : kinds) {
        switch (kind) {
            case ialign::OracleKind::hard:
                write_batch(ialign::compute_hard_oracles(corpus, indices, pairing, stops));
                break;
            case ialign::OracleKind::soft: {
                const ialign::Classifier informed =
                    ialign::load_classifier(args.informed_model_path);
                ialign::SoftOracleOptions opts;
                opts.ig = config.ig;
                write_batch(ialign::compute_soft_oracles(informed, corpus, indices,
                                                         pairing, opts));
                break;
            }
            case ialign::OracleKind::expert: {
                if (!fs::exists(args.experts_path))
                    throw ialign::IoError("expert annotations not found; expected file " +
                                          args.experts_path);
                const auto sets = ialign::load_expert_annotations(args.experts_path);
                std::map<std::string, bool> has_set;
                for (const auto& s : sets) has_set[s.example_id] = true;
                std::vector<std::string> ids;
                for (const auto& e : corpus.examples)
                    if (has_set.count(e.id)) ids.push_back(e.id);
                std::map<std::string, std::string> expert_pairing;
                if (args.self_pairing) {
                    for (const std::string& id : ids) expert_pairing[id] = id;
                } else {
                    ialign::Rng rng = ialign::derive_stream(args.seed, "pairing/expert");
                    expert_pairing = ialign::random_id_pairing(ids, rng);
                }
                write_batch(
                    ialign::compute_expert_oracles(corpus, indices, sets, expert_pairing));
                break;
            }
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// align
// ---------------------------------------------------------------------------

struct AlignArgs {
    std::string corpus_path;
    std::vector<std::string> model_paths;
    std::string informed_model_path;
    std::string experts_path;
    std::string stopwords_path;
    std::vector<std::string> oracle_names = {"hard"};
    std::string out_dir;
    int steps = 256;
    std::string baseline = "zero";
    std::string target = "gold";
    bool wrong_only = false;
    bool self_pairing = false;
    uint64_t seed = 0;
};

int cmd_align(const AlignArgs& args) {
    ialign::RunConfig config;
    config.corpus_path = args.corpus_path;
    config.model_paths = args.model_paths;
    config.informed_model_path = args.informed_model_path;
    config.expert_annotations_path = args.experts_path;
    config.stopwords_path = args.stopwords_path;
    config.oracles = parse_oracles(args.oracle_names);
    config.ig.steps = args.steps;
    config.ig.baseline = ialign::baseline_from_name(args.baseline);
    config.ig.target = ialign::target_from_name(args.target);
    config.seed = args.seed;
    config.wrong_only = args.wrong_only;
    config.debug_self_pairing = args.self_pairing;
    config.output_dir = args.out_dir;

    const ialign::Corpus corpus = ialign::load_corpus(args.corpus_path);
    const ialign::StopWordList stops = load_stops(args.stopwords_path);

    std::vector<ialign::Classifier> models;
    for (const std::string& path : args.model_paths)
        models.push_back(ialign::load_classifier(path));

    ialign::Classifier informed;
    const ialign::Classifier* informed_ptr = nullptr;
    if (!args.informed_model_path.empty()) {
        informed = ialign::load_classifier(args.informed_model_path);
        informed_ptr = &informed;
    }

    std::vector<ialign::ExpertAnnotationSet> experts;
    bool wants_expert = false;
    for (ialign::OracleKind k : config.oracles)
        if (k == ialign::OracleKind::expert) wants_expert = true;
    if (wants_expert) {
        if (args.experts_path.empty() || !fs::exists(args.experts_path))
            throw ialign::IoError("expert annotations not found; expected file " +
                                  (args.experts_path.empty() ? std::string("<--experts PATH>")
                                                             : args.experts_path));
        experts = ialign::load_expert_annotations(args.experts_path);
    }

    const ialign::AlignOutcome outcome =
        ialign::run_alignment(config, corpus, models, informed_ptr, experts, stops);
    const auto written = ialign::write_align_outputs(args.out_dir, config, outcome);

    std::printf("%s", outcome.table_markdown.c_str());
    for (const auto& path : written)
        std::printf("wrote %s\n", path.string().c_str());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> report_paths;
    std::string out_dir;
};

int cmd_report(const ReportArgs& args) {
    std::vector<ialign::DeltaAReport> reports;
    for (const std::string& path : args.report_paths) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(ialign::read_file(path));
        } catch (const nlohmann::json::exception& e) {
            throw ialign::ValidationError(path + ": " + e.what());
        }
        reports.push_back(ialign::report_from_json(j));
    }

    const std::string md = ialign::render_markdown_table(reports);
    const std::string csv = ialign::render_csv_table(reports);
    fs::create_directories(args.out_dir);
    ialign::atomic_write(fs::path(args.out_dir) / "table.md", md);
    ialign::atomic_write(fs::path(args.out_dir) / "table.csv", csv);
    std::printf("%s", md.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Importance-alignment toolkit for small differentiable text classifiers"};
    app.require_subcommand(1);

    const std::vector<std::string> kOracleNames = {"hard", "soft", "expert"};
    const std::vector<std::string> kBaselines = {"zero", "pad"};
    const std::vector<std::string> kTargets = {"gold", "predicted"};

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "Train a classifier checkpoint");
    train->add_option("--corpus", train_args.corpus_path, "Training corpus (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    train->add_option("--dev", train_args.dev_path, "Held-out corpus for dev accuracy")
        ->check(CLI::ExistingFile);
    train->add_option("--out", train_args.out_dir, "Output directory")->required();
    train->add_option("--task", train_args.task, "Training task")
        ->check(CLI::IsMember({"nli_3way", "explanation_informed_6way"}));
    train->add_option("--arch", train_args.arch, "Model architecture")
        ->check(CLI::IsMember({"bag_of_embeddings_linear", "mean_embedding_mlp"}));
    train->add_option("--model-id", train_args.model_id, "Checkpoint identifier");
    train->add_option("--seed", train_args.seed, "Random seed");
    train->add_option("--epochs", train_args.epochs, "Training epochs");
    train->add_option("--lr", train_args.lr, "Learning rate");
    train->add_option("--batch", train_args.batch, "Mini-batch size");
    train->add_option("--dim", train_args.dim, "Embedding dimension");
    train->add_option("--hidden", train_args.hidden, "MLP hidden dimension");

    AttributeArgs attr_args;
    CLI::App* attribute =
        app.add_subcommand("attribute", "Export integrated-gradient attributions");
    attribute->add_option("--corpus", attr_args.corpus_path, "Corpus (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    attribute->add_option("--model", attr_args.model_path, "Classifier checkpoint")
        ->required()
        ->check(CLI::ExistingFile);
    attribute->add_option("--out", attr_args.out_dir, "Output directory")->required();
    attribute->add_option("--steps", attr_args.steps, "Integration steps")
        ->check(CLI::PositiveNumber);
    attribute->add_option("--baseline", attr_args.baseline, "Baseline embedding")
        ->check(CLI::IsMember(kBaselines));
    attribute->add_option("--target", attr_args.target, "Attribution target class")
        ->check(CLI::IsMember(kTargets));
    attribute->add_flag("--wrong-only", attr_args.wrong_only,
                        "Keep only wrongly predicted examples");
    attribute->add_option("--seed", attr_args.seed, "Seed recorded in artifacts");

    OracleArgs oracle_args;
    CLI::App* oracle = app.add_subcommand("oracle", "Export oracle importance vectors");
    oracle->add_option("--corpus", oracle_args.corpus_path, "Corpus (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    oracle->add_option("--oracles", oracle_args.oracle_names, "Oracle kinds")
        ->delimiter(',')
        ->check(CLI::IsMember(kOracleNames));
    oracle->add_option("--informed-model", oracle_args.informed_model_path,
                       "6-class checkpoint (required for soft)")
        ->check(CLI::ExistingFile);
    oracle->add_option("--experts", oracle_args.experts_path,
                       "Expert annotation JSONL (required for expert)");
    oracle->add_option("--stopwords", oracle_args.stopwords_path, "Stop-word list file")
        ->check(CLI::ExistingFile);
    oracle->add_option("--out", oracle_args.out_dir, "Output directory")->required();
    oracle->add_option("--steps", oracle_args.steps, "Integration steps (soft oracle)")
        ->check(CLI::PositiveNumber);
    oracle->add_option("--baseline", oracle_args.baseline, "Baseline embedding")
        ->check(CLI::IsMember(kBaselines));
    oracle->add_flag("--wrong-only", oracle_args.wrong_only,
                     "Keep only wrongly predicted examples");
    oracle->add_flag("--debug-self-pairing", oracle_args.self_pairing,
                     "Pair each example with itself (debug)");
    oracle->add_option("--seed", oracle_args.seed, "Random-pairing seed");

    AlignArgs align_args;
    CLI::App* align = app.add_subcommand("align", "Run the alignment experiment");
    align->add_option("--corpus", align_args.corpus_path, "Corpus (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    align->add_option("--model", align_args.model_paths, "3-class checkpoint (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    align->add_option("--informed-model", align_args.informed_model_path,
                      "6-class checkpoint (required for soft)")
        ->check(CLI::ExistingFile);
    align->add_option("--experts", align_args.experts_path,
                      "Expert annotation JSONL (required for expert)");
    align->add_option("--stopwords", align_args.stopwords_path, "Stop-word list file")
        ->check(CLI::ExistingFile);
    align->add_option("--oracles", align_args.oracle_names, "Oracle kinds")
        ->delimiter(',')
        ->check(CLI::IsMember(kOracleNames));
    align->add_option("--out", align_args.out_dir, "Output directory")->required();
    align->add_option("--steps", align_args.steps, "Integration steps")
        ->check(CLI::PositiveNumber);
    align->add_option("--baseline", align_args.baseline, "Baseline embedding")
        ->check(CLI::IsMember(kBaselines));
    align->add_option("--target", align_args.target, "Attribution target class")
        ->check(CLI::IsMember(kTargets));
    align->add_flag("--wrong-only", align_args.wrong_only,
                    "Keep only wrongly predicted examples");
    align->add_flag("--debug-self-pairing", align_args.self_pairing,
                    "Pair each example with itself (debug)");
    align->add_option("--seed", align_args.seed, "Experiment seed");

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "Re-render tables from report JSON");
    report->add_option("--reports", report_args.report_paths, "Report JSON files")
        ->required()
        ->check(CLI::ExistingFile);
    report->add_option("--out", report_args.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        app.exit(e);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    // Cross-flag requirements surface as usage errors before any work runs.
    if (oracle->parsed() || align->parsed()) {
        const auto& names = oracle->parsed() ? oracle_args.oracle_names
                                             : align_args.oracle_names;
        const auto& informed = oracle->parsed() ? oracle_args.informed_model_path
                                                : align_args.informed_model_path;
        for (const std::string& name : names) {
            if (name == "soft" && informed.empty()) {
                std::fprintf(stderr,
                             "error: --oracles soft requires --informed-model\n");
                return kExitUsage;
            }
        }
    }

    try {
        if (train->parsed()) return cmd_train(train_args);
        if (attribute->parsed()) return cmd_attribute(attr_args);
        if (oracle->parsed()) return cmd_oracle(oracle_args);
        if (align->parsed()) return cmd_align(align_args);
        if (report->parsed()) return cmd_report(report_args);
    } catch (const ialign::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}
