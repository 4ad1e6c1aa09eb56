// Regenerates the shipped sample data: a seeded synthetic NLI corpus with
// free-text explanations, expert annotation sidecars for a subset, and the
// built-in stop-word list as a file.

#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"

#include "ialign/io.hpp"
#include "ialign/oracle.hpp"
#include "ialign/stopwords.hpp"
#include "ialign/synthetic.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"Generate the shipped synthetic sample data"};

    std::string out_dir = "data";
    uint64_t seed = 1337;
    size_t examples = 200;
    size_t annotated = 60;
    size_t annotators = 3;
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Generation seed");
    app.add_option("--examples", examples, "Corpus size");
    app.add_option("--annotated", annotated, "Examples with expert annotations");
    app.add_option("--annotators", annotators, "Annotators per example");

    CLI11_PARSE(app, argc, argv);

    const ialign::Corpus corpus = ialign::make_alignment_corpus(examples, seed);
    const auto expert_sets =
        ialign::make_expert_annotations(corpus, annotated, annotators, seed);

    fs::create_directories(out_dir);
    const fs::path corpus_path =
        fs::path(out_dir) / ("synthetic_nli_" + std::to_string(examples) + ".jsonl");
    ialign::atomic_write(corpus_path, ialign::corpus_to_jsonl(corpus));
    std::printf("wrote %s (%zu examples)\n", corpus_path.string().c_str(), corpus.size());

    const fs::path expert_path = fs::path(out_dir) / "expert_annotations.jsonl";
    ialign::atomic_write(expert_path, ialign::expert_annotations_to_jsonl(expert_sets));
    std::printf("wrote %s (%zu examples x %zu annotators)\n",
                expert_path.string().c_str(), expert_sets.size(), annotators);

    const fs::path stops_path = fs::path(out_dir) / "stopwords_en.txt";
    ialign::atomic_write(stops_path,
                         ialign::stop_words_to_text(ialign::default_stop_words()));
    std::printf("wrote %s\n", stops_path.string().c_str());
    return 0;
}
