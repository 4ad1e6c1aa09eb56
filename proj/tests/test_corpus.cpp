#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "ialign/corpus.hpp"
#include "ialign/stopwords.hpp"
#include "support/tmpdir.hpp"

using namespace ialign;
using testsupport::TempDir;

TEST_CASE("tokenize splits on whitespace and punctuation", "[corpus]") {
    const TokenSequence seq = tokenize("The dog runs.");
    CHECK(seq.tokens == std::vector<std::string>{"The", "dog", "runs", "."});

    CHECK(tokenize("it's").tokens == std::vector<std::string>{"it", "'", "s"});
    CHECK(tokenize("").empty());
    CHECK(tokenize(" \t\n ").empty());
}

TEST_CASE("tokenize keeps case and exact spans", "[corpus]") {
    const std::string text = "A man, who (really) liked tea-cakes!";
    const TokenSequence seq = tokenize(text);

    CHECK(seq.tokens.front() == "A");

    // Spans must reproduce every non-whitespace character, in order.
    std::string via_spans;
    size_t prev_end = 0;
    for (size_t i = 0; i < seq.size(); ++i) {
        const auto [start, end] = seq.spans[i];
        CHECK(start >= prev_end);
        CHECK(text.substr(start, end - start) == seq.tokens[i]);
        via_spans += seq.tokens[i];
        prev_end = end;
    }
    std::string non_ws;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) non_ws += c;
    CHECK(via_spans == non_ws);
}

TEST_CASE("tokenize treats multi-byte UTF-8 as word characters", "[corpus]") {
    const TokenSequence seq = tokenize("caf\xc3\xa9 na\xc3\xafve");
    REQUIRE(seq.size() == 2);
    CHECK(seq.tokens[0] == "caf\xc3\xa9");
    CHECK(seq.tokens[1] == "na\xc3\xafve");
}

TEST_CASE("tokenize is deterministic", "[corpus]") {
    const std::string text = "Same text, same tokens; every run.";
    const TokenSequence a = tokenize(text);
    const TokenSequence b = tokenize(text);
    CHECK(a.tokens == b.tokens);
    CHECK(a.spans == b.spans);
}

TEST_CASE("concat_input inserts one flagged separator", "[corpus]") {
    Example e;
    e.id = "x";
    e.premise = "A dog.";
    e.hypothesis = "An animal.";
    const TokenSequence seq = concat_input(e);

    CHECK(seq.tokens ==
          std::vector<std::string>{"A", "dog", ".", "<SEP>", "An", "animal", "."});
    REQUIRE(seq.separator_positions == std::vector<size_t>{3});
    CHECK(seq.is_separator(3));
    CHECK_FALSE(seq.is_separator(2));
    CHECK(seq.content_size() == 6);

    // Length identity: premise + 1 + hypothesis.
    Example f = e;
    f.premise = "Three tokens here";
    f.hypothesis = "and two";
    CHECK(concat_input(f).size() == 3 + 1 + 2);

    // Spans stay monotone across the seam.
    size_t prev = 0;
    for (const auto& [start, end] : seq.spans) {
        CHECK(start >= prev);
        CHECK(end > start);
        prev = end;
    }
}

TEST_CASE("concat_input rejects empty sides", "[corpus]") {
    Example e;
    e.id = "x";
    e.premise = "";
    e.hypothesis = "An animal.";
    CHECK_THROWS_AS(concat_input(e), ValidationError);

    e.premise = "A dog.";
    e.hypothesis = "   ";
    CHECK_THROWS_AS(concat_input(e), ValidationError);
}

TEST_CASE("build_informed_sequence appends explanation after a separator", "[corpus]") {
    Example e;
    e.id = "x";
    e.premise = "A dog.";
    e.hypothesis = "An animal.";
    const TokenSequence input = concat_input(e);
    const TokenSequence expl = tokenize("Dogs are animals");
    const TokenSequence seq = build_informed_sequence(input, expl);

    REQUIRE(seq.size() == input.size() + 1 + expl.size());
    CHECK(seq.separator_positions == std::vector<size_t>{3, input.size()});
    CHECK(seq.tokens[input.size()] == "<SEP>");
    CHECK(seq.tokens.back() == "animals");

    // Input positions are untouched.
    for (size_t i = 0; i < input.size(); ++i) CHECK(seq.tokens[i] == input.tokens[i]);

    // Empty explanations are allowed and add only the separator.
    const TokenSequence bare = build_informed_sequence(input, tokenize(""));
    CHECK(bare.size() == input.size() + 1);
}

TEST_CASE("stop-word list is case-insensitive and complete", "[corpus]") {
    const StopWordList sw = default_stop_words();
    CHECK(sw.words.size() == 179);
    CHECK(sw.contains("the"));
    CHECK(sw.contains("The"));
    CHECK(sw.contains("IS"));
    CHECK(sw.contains("not"));
    CHECK(sw.contains("s"));
    CHECK_FALSE(sw.contains("dog"));
    CHECK_FALSE(sw.contains("animal"));
}

TEST_CASE("stop-word list round-trips through a file", "[corpus]") {
    const TempDir dir;
    const StopWordList original = default_stop_words();
    const auto path = dir.write("stopwords.txt", stop_words_to_text(original));
    const StopWordList reloaded = StopWordList::from_file(path);
    CHECK(reloaded.words == original.words);

    const auto empty_path = dir.write("empty.txt", "\n\n");
    CHECK_THROWS_AS(StopWordList::from_file(empty_path), ValidationError);
}

namespace {

const char* kGoodJsonl =
    R"({"premise": "A dog runs.", "hypothesis": "An animal moves.", "label": "entailment", "explanation": "Dogs are animals"}
{"premise": "A cat sleeps.", "hypothesis": "The cat is awake.", "label": "Contradiction", "explanation": null, "model_prediction": "neutral"}
)";

}  // namespace

TEST_CASE("load_corpus ingests well-formed JSONL", "[corpus]") {
    const TempDir dir;
    const auto path = dir.write("corpus.jsonl", kGoodJsonl);
    const Corpus corpus = load_corpus(path);

    REQUIRE(corpus.size() == 2);
    CHECK(corpus.examples[0].id == "000001");
    CHECK(corpus.examples[1].id == "000002");
    CHECK(corpus.examples[0].gold_label == Label::entailment);
    CHECK(corpus.examples[0].has_explanation());
    CHECK_FALSE(corpus.examples[0].model_prediction.has_value());

    // Case-insensitive label normalization.
    CHECK(corpus.examples[1].gold_label == Label::contradiction);
    CHECK_FALSE(corpus.examples[1].has_explanation());
    REQUIRE(corpus.examples[1].model_prediction.has_value());
    CHECK(*corpus.examples[1].model_prediction == Label::neutral);

    CHECK(corpus.find("000002") != nullptr);
    CHECK(corpus.find("missing") == nullptr);
}

TEST_CASE("load_corpus reports malformed lines with their number", "[corpus]") {
    const TempDir dir;

    const auto bad_json = dir.write("bad.jsonl",
                                    "{\"premise\": \"ok\"\n");
    try {
        load_corpus(bad_json);
        FAIL("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(err.line() == 1);
    }

    const auto bad_label = dir.write(
        "label.jsonl",
        R"({"premise": "p", "hypothesis": "h", "label": "maybe", "explanation": null})"
        "\n");
    try {
        load_corpus(bad_label);
        FAIL("expected ValidationError");
    } catch (const ValidationError& err) {
        CHECK(std::string(err.what()).find("line 1") != std::string::npos);
        CHECK(std::string(err.what()).find("maybe") != std::string::npos);
    }

    const auto missing =
        dir.write("missing.jsonl",
                  R"({"premise": "p", "hypothesis": "h", "label": "neutral"})"
                  "\n");
    CHECK_THROWS_AS(load_corpus(missing), ParseError);

    const auto dup = dir.write(
        "dup.jsonl",
        R"({"id": "a", "premise": "p", "hypothesis": "h", "label": "neutral", "explanation": null}
{"id": "a", "premise": "q", "hypothesis": "g", "label": "neutral", "explanation": null}
)");
    CHECK_THROWS_AS(load_corpus(dup), ValidationError);

    CHECK_THROWS_AS(load_corpus(dir.path() / "does_not_exist.jsonl"), IoError);
}

TEST_CASE("corpus serialization round-trips", "[corpus]") {
    const TempDir dir;
    const auto path = dir.write("corpus.jsonl", kGoodJsonl);
    const Corpus corpus = load_corpus(path);

    const auto again = dir.write("again.jsonl", corpus_to_jsonl(corpus));
    const Corpus reloaded = load_corpus(again);
    REQUIRE(reloaded.size() == corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
        CHECK(reloaded.examples[i].id == corpus.examples[i].id);
        CHECK(reloaded.examples[i].premise == corpus.examples[i].premise);
        CHECK(reloaded.examples[i].hypothesis == corpus.examples[i].hypothesis);
        CHECK(reloaded.examples[i].gold_label == corpus.examples[i].gold_label);
        CHECK(reloaded.examples[i].explanation == corpus.examples[i].explanation);
        CHECK(reloaded.examples[i].model_prediction == corpus.examples[i].model_prediction);
    }
}
