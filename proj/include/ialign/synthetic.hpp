#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ialign/corpus.hpp"
#include "ialign/oracle.hpp"
#include "ialign/rng.hpp"
#include "ialign/stopwords.hpp"

namespace ialign {

// Seeded corpus generators. They exist so the sample data, the test suites,
// and the acceptance harness can all rebuild identical inputs from a seed
// instead of shipping opaque fixtures.

namespace detail {

inline const std::vector<std::string>& filler_pool() {
    static const std::vector<std::string> pool{
        "harbor",   "lantern", "meadow",  "violin",  "glacier", "market",
        "pilot",    "engine",  "orchard", "kettle",  "bridge",  "sparrow",
        "cellar",   "canvas",  "thunder", "ribbon",  "saddle",  "furnace",
        "compass",  "ledger",  "anchor",  "bellows", "cabinet", "drizzle",
        "estuary",  "fiddle",  "garnet",  "hammock", "isthmus", "jigsaw",
        "kennel",   "lagoon",  "mason",   "nutmeg",  "oxcart",  "paddle",
        "quarry",   "rafter",  "sickle",  "trellis", "urchin",  "vellum",
        "walnut",   "yonder",  "zephyr",  "awning",  "bobbin",  "cistern",
        "dogwood",  "ember",   "flagon",  "gutter",  "hemlock", "ingot",
        "juniper",  "kiln",    "lichen",  "mortar",  "nettle",  "oriole",
        "pewter",   "quiver",  "russet",  "shingle", "tallow",  "umber",
        "velvet",   "wicker",  "yarrow",  "attic",   "brook",   "clover",
        "dapple",   "eddy",    "fen",     "grotto",  "heath",   "inlet",
        "jetty",    "knoll",   "loam",    "mire",    "notch",   "outcrop",
        "pasture",  "ridge",   "swale",   "thicket", "upland",  "vale",
        "warren",   "copse",   "barrow",  "culvert", "dam",     "eave",
        "ford",     "gable",   "hedge",   "stile",   "weir",    "byre",
        "carries",  "gathers", "follows", "crosses", "guards",  "shelters",
        "borders",  "signals", "repairs", "studies", "weighs",  "trades",
        "stores",   "lifts",   "turns",   "holds",   "meets",   "passes",
        "narrow",   "quiet",   "sturdy",  "faded",   "distant", "hollow",
        "amber",    "broad",   "crooked", "damp",    "early",   "frosted",
        "gentle",   "heavy",   "idle",    "jagged",  "keen",    "low",
        "mossy",    "new",     "old",     "pale",    "quick",   "rough",
        "steep",    "tall",    "uneven",  "vivid",   "warm",    "young",
        "ancient",  "bright",  "coastal", "dusty",   "eastern", "fallow",
        "granite",  "humid",   "inner",   "joined",  "kindred", "level",
        "midland",  "northern", "open",   "plain",   "quilted", "rural",
        "southern", "timbered", "upper",  "vaulted", "western", "yearly",
    };
    return pool;
}

inline std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (size_t i = 0; i < words.size(); ++i) {
        if (i > 0) out += ' ';
        out += words[i];
    }
    return out;
}

inline std::vector<std::string> sample_words(Rng& rng, size_t count) {
    const auto& pool = filler_pool();
    std::vector<std::string> words(count);
    for (size_t i = 0; i < count; ++i) words[i] = pool[rng.uniform_index(pool.size())];
    return words;
}

inline const char* label_marker(Label l) {
    switch (l) {
        case Label::entailment: return "certainly";
        case Label::contradiction: return "never";
        case Label::neutral: return "possibly";
    }
    return "?";
}

}  // namespace detail

// 3-way corpus whose gold label is fully determined by one marker token in
// the hypothesis: Bayes accuracy 1.0, linearly separable from mean
// embeddings. No explanations.
inline Corpus make_marker_corpus(size_t n, uint64_t seed) {
    Corpus corpus;
    corpus.name = "marker";
    Rng rng = derive_stream(seed, "synthetic/marker");
    static const std::vector<std::string> openers{"that", "it", "this", "everything"};
    static const std::vector<std::string> verbs{"looks", "seems", "appears", "sounds"};
    static const std::vector<std::string> closers{"overall", "somehow", "today", "here"};
    for (size_t i = 0; i < n; ++i) {
        const Label label = label_from_index(static_cast<int>(i % kNumLabels));
        Example e;
        e.id = "mk" + std::to_string(i);
        e.gold_label = label;
        e.premise = "the " + detail::join_words(detail::sample_words(rng, 4)) + " rests";
        e.hypothesis = openers[rng.uniform_index(openers.size())] + " " +
                       verbs[rng.uniform_index(verbs.size())] + " " +
                       detail::label_marker(label) + " " +
                       closers[rng.uniform_index(closers.size())];
        corpus.examples.push_back(std::move(e));
    }
    return corpus;
}

// 6-way corpus where every explanation copies its hypothesis verbatim, so a
// matched pair repeats the hypothesis marker and a mismatched pair mixes two
// markers. Labels balance by round-robin.
inline Corpus make_copy_explanation_corpus(size_t n, uint64_t seed) {
    Corpus corpus = make_marker_corpus(n, seed);
    corpus.name = "copy_explanation";
    for (Example& e : corpus.examples) e.explanation = e.hypothesis;
    return corpus;
}

// Long-sequence corpus sized for correlation stability (about 35-45 tokens
// per example once premise, separator, and hypothesis are concatenated).
// Explanations are non-empty and model_prediction is filled to be correct at
// roughly the given rate, so prediction-based filters can be exercised.
inline Corpus make_alignment_corpus(size_t n, uint64_t seed,
                                    double prediction_accuracy = 0.7) {
    Corpus corpus;
    corpus.name = "alignment";
    Rng rng = derive_stream(seed, "synthetic/alignment");
    for (size_t i = 0; i < n; ++i) {
        const Label label = label_from_index(static_cast<int>(i % kNumLabels));
        Example e;
        e.id = "ax" + std::to_string(i);
        e.gold_label = label;
        e.premise = detail::join_words(detail::sample_words(rng, 24 + rng.uniform_index(9)));
        std::vector<std::string> hyp = detail::sample_words(rng, 7 + rng.uniform_index(4));
        hyp.insert(hyp.begin() + static_cast<long>(rng.uniform_index(hyp.size() + 1)),
                   detail::label_marker(label));
        e.hypothesis = detail::join_words(hyp);
        std::vector<std::string> expl = detail::sample_words(rng, 6 + rng.uniform_index(5));
        expl.push_back(detail::label_marker(label));
        e.explanation = detail::join_words(expl);
        if (rng.uniform() < prediction_accuracy) {
            e.model_prediction = label;
        } else {
            const int shift = 1 + static_cast<int>(rng.uniform_index(2));
            e.model_prediction = label_from_index((label_index(label) + shift) % kNumLabels);
        }
        corpus.examples.push_back(std::move(e));
    }
    return corpus;
}

// Expert annotations for the first `count` explanation-bearing examples:
// each annotator starts from the token-overlap vector and flips a small
// fraction of entries, giving plausible disagreement.
inline std::vector<ExpertAnnotationSet> make_expert_annotations(
    const Corpus& corpus, size_t count, size_t annotators, uint64_t seed,
    double flip_probability = 0.15) {
    const StopWordList stops = default_stop_words();
    Rng rng = derive_stream(seed, "synthetic/experts");
    std::vector<ExpertAnnotationSet> sets;
    for (const Example& e : corpus.examples) {
        if (sets.size() >= count) break;
        if (!e.has_explanation()) continue;
        const OracleVector base =
            hard_oracle(concat_input(e), tokenize(e.explanation), stops);
        ExpertAnnotationSet s;
        s.example_id = e.id;
        for (size_t k = 0; k < annotators; ++k) {
            s.annotator_ids.push_back("annotator_" + std::to_string(k + 1));
            std::vector<int> votes(base.per_token.size());
            for (size_t i = 0; i < votes.size(); ++i) {
                const int v = base.per_token[i] > 0.5 ? 1 : 0;
                votes[i] = rng.uniform() < flip_probability ? 1 - v : v;
            }
            s.votes.push_back(std::move(votes));
        }
        sets.push_back(std::move(s));
    }
    return sets;
}

}  // namespace ialign
