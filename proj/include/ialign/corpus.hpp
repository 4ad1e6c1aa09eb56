#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "ialign/errors.hpp"
#include "ialign/io.hpp"

namespace ialign {

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

enum class Label { entailment, contradiction, neutral };

inline constexpr int kNumLabels = 3;

inline std::string to_lower_ascii(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

inline const char* label_name(Label l) {
    switch (l) {
        case Label::entailment: return "entailment";
        case Label::contradiction: return "contradiction";
        case Label::neutral: return "neutral";
    }
    return "?";
}

inline int label_index(Label l) { return static_cast<int>(l); }

inline Label label_from_index(int i) {
    if (i < 0 || i >= kNumLabels) throw IndexError("label index out of range");
    return static_cast<Label>(i);
}

// Case-insensitive; anything outside the three-value domain is rejected.
inline std::optional<Label> try_parse_label(const std::string& raw) {
    const std::string s = to_lower_ascii(raw);
    if (s == "entailment") return Label::entailment;
    if (s == "contradiction") return Label::contradiction;
    if (s == "neutral") return Label::neutral;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct Example {
    std::string id;
    std::string premise;
    std::string hypothesis;
    Label gold_label = Label::entailment;
    std::string explanation;  // empty when the corpus carries none
    std::optional<Label> model_prediction;

    bool has_explanation() const { return !explanation.empty(); }
};

inline constexpr const char* kSeparatorToken = "<SEP>";

// Ordered tokens with byte spans into the originating text. Sequences built
// by concatenation carry separator positions; separators are bookkeeping
// tokens and never enter importance vectors.
struct TokenSequence {
    std::vector<std::string> tokens;
    std::vector<std::pair<size_t, size_t>> spans;  // [start, end) byte offsets
    std::vector<size_t> separator_positions;       // sorted

    size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }

    bool is_separator(size_t i) const {
        return std::binary_search(separator_positions.begin(),
                                  separator_positions.end(), i);
    }

    // Number of non-separator tokens.
    size_t content_size() const { return tokens.size() - separator_positions.size(); }

    std::vector<std::string> content_tokens() const {
        std::vector<std::string> out;
        out.reserve(content_size());
        for (size_t i = 0; i < tokens.size(); ++i)
            if (!is_separator(i)) out.push_back(tokens[i]);
        return out;
    }
};

struct StopWordList {
    std::set<std::string> words;  // stored lowercase
    std::string source_name;

    bool contains(const std::string& token) const {
        return words.count(to_lower_ascii(token)) > 0;
    }

    // One word per line; blank lines ignored.
    static StopWordList from_file(const std::filesystem::path& path) {
        StopWordList list;
        list.source_name = path.string();
        for (const std::string& line : read_lines(path))
            if (!line.empty()) list.words.insert(to_lower_ascii(line));
        if (list.words.empty())
            throw ValidationError("stop-word file is empty: " + path.string());
        return list;
    }
};

struct Corpus {
    std::string name;
    std::vector<Example> examples;

    size_t size() const { return examples.size(); }

    const Example* find(const std::string& id) const {
        for (const Example& e : examples)
            if (e.id == id) return &e;
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_ascii_space(unsigned char c) { return std::isspace(c) != 0; }

// ASCII punctuation splits into single-character tokens. Bytes >= 0x80
// (multi-byte UTF-8) are treated as word characters.
inline bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; }

}  // namespace detail

// Deterministic whitespace-and-punctuation tokenizer. Tokens keep their
// original case; every non-whitespace byte lands in exactly one span.
inline TokenSequence tokenize(const std::string& text) {
    TokenSequence seq;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (detail::is_ascii_space(c)) {
            ++i;
            continue;
        }
        if (detail::is_ascii_punct(c)) {
            seq.tokens.emplace_back(1, text[i]);
            seq.spans.emplace_back(i, i + 1);
            ++i;
            continue;
        }
        size_t j = i;
        while (j < n) {
            const unsigned char d = static_cast<unsigned char>(text[j]);
            if (detail::is_ascii_space(d) || detail::is_ascii_punct(d)) break;
            ++j;
        }
        seq.tokens.push_back(text.substr(i, j - i));
        seq.spans.emplace_back(i, j);
        i = j;
    }
    return seq;
}

// Premise tokens, one separator, hypothesis tokens. Spans are laid out over
// the virtual text "premise <SEP> hypothesis" so they stay monotone.
inline TokenSequence concat_input(const Example& e) {
    TokenSequence premise = tokenize(e.premise);
    TokenSequence hypothesis = tokenize(e.hypothesis);
    if (premise.empty())
        throw ValidationError("example " + e.id + ": premise has no tokens");
    if (hypothesis.empty())
        throw ValidationError("example " + e.id + ": hypothesis has no tokens");

    TokenSequence seq = std::move(premise);
    const size_t sep_start = e.premise.size() + 1;
    const size_t sep_len = std::string(kSeparatorToken).size();
    seq.separator_positions.push_back(seq.tokens.size());
    seq.tokens.emplace_back(kSeparatorToken);
    seq.spans.emplace_back(sep_start, sep_start + sep_len);
    const size_t shift = sep_start + sep_len + 1;
    for (size_t i = 0; i < hypothesis.size(); ++i) {
        seq.tokens.push_back(std::move(hypothesis.tokens[i]));
        seq.spans.emplace_back(hypothesis.spans[i].first + shift,
                               hypothesis.spans[i].second + shift);
    }
    return seq;
}

// Input sequence (premise, separator, hypothesis), a second separator, then
// the explanation tokens. Positions below input.size() that are not
// separators are the input-token positions downstream oracles keep.
inline TokenSequence build_informed_sequence(const TokenSequence& input,
                                             const TokenSequence& explanation) {
    TokenSequence seq = input;
    const size_t base = seq.spans.empty() ? 0 : seq.spans.back().second;
    const size_t sep_len = std::string(kSeparatorToken).size();
    seq.separator_positions.push_back(seq.tokens.size());
    seq.tokens.emplace_back(kSeparatorToken);
    seq.spans.emplace_back(base + 1, base + 1 + sep_len);
    const size_t shift = base + 1 + sep_len + 1;
    for (size_t i = 0; i < explanation.size(); ++i) {
        seq.tokens.push_back(explanation.tokens[i]);
        seq.spans.emplace_back(explanation.spans[i].first + shift,
                               explanation.spans[i].second + shift);
    }
    return seq;
}

// ---------------------------------------------------------------------------
// JSONL ingestion
// ---------------------------------------------------------------------------

enum class CorpusSchema { nli_explanations_v1 };

namespace detail {

inline std::string synthesize_id(size_t line_number) {
    std::string digits = std::to_string(line_number);
    return std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
}

inline std::string require_string(const nlohmann::json& obj, const char* key,
                                  size_t line) {
    if (!obj.contains(key))
        throw ParseError(line, std::string("missing field \"") + key + "\"");
    if (!obj[key].is_string())
        throw ParseError(line, std::string("field \"") + key + "\" must be a string");
    return obj[key].get<std::string>();
}

}  // namespace detail

// One JSON object per line: {"id"?, "premise", "hypothesis", "label",
// "explanation" (string or null), "model_prediction"?}.
inline Corpus load_corpus(const std::filesystem::path& path,
                          CorpusSchema schema = CorpusSchema::nli_explanations_v1) {
    (void)schema;  // single schema today; the parameter pins the file contract
    Corpus corpus;
    corpus.name = path.stem().string();
    std::set<std::string> seen_ids;

    const std::vector<std::string> lines = read_lines(path);
    for (size_t idx = 0; idx < lines.size(); ++idx) {
        const size_t line_no = idx + 1;
        const std::string& line = lines[idx];
        if (line.empty()) continue;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& err) {
            throw ParseError(line_no, std::string("malformed JSON: ") + err.what());
        }
        if (!obj.is_object()) throw ParseError(line_no, "line is not a JSON object");

        Example e;
        e.premise = detail::require_string(obj, "premise", line_no);
        e.hypothesis = detail::require_string(obj, "hypothesis", line_no);

        const std::string raw_label = detail::require_string(obj, "label", line_no);
        const auto label = try_parse_label(raw_label);
        if (!label)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": unknown label \"" + raw_label + "\"");
        e.gold_label = *label;

        if (!obj.contains("explanation"))
            throw ParseError(line_no, "missing field \"explanation\"");
        if (obj["explanation"].is_null())
            e.explanation.clear();
        else if (obj["explanation"].is_string())
            e.explanation = obj["explanation"].get<std::string>();
        else
            throw ParseError(line_no, "field \"explanation\" must be a string or null");

        if (obj.contains("id")) {
            if (!obj["id"].is_string())
                throw ParseError(line_no, "field \"id\" must be a string");
            e.id = obj["id"].get<std::string>();
            if (e.id.empty())
                throw ValidationError("line " + std::to_string(line_no) + ": empty id");
        } else {
            e.id = detail::synthesize_id(line_no);
        }

        if (obj.contains("model_prediction") && !obj["model_prediction"].is_null()) {
            if (!obj["model_prediction"].is_string())
                throw ParseError(line_no, "field \"model_prediction\" must be a string");
            const std::string raw = obj["model_prediction"].get<std::string>();
            const auto pred = try_parse_label(raw);
            if (!pred)
                throw ValidationError("line " + std::to_string(line_no) +
                                      ": unknown model_prediction \"" + raw + "\"");
            e.model_prediction = *pred;
        }

        if (!seen_ids.insert(e.id).second)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": duplicate id \"" + e.id + "\"");
        corpus.examples.push_back(std::move(e));
    }
    return corpus;
}

inline nlohmann::json example_to_json(const Example& e) {
    nlohmann::json obj;
    obj["id"] = e.id;
    obj["premise"] = e.premise;
    obj["hypothesis"] = e.hypothesis;
    obj["label"] = label_name(e.gold_label);
    if (e.explanation.empty())
        obj["explanation"] = nullptr;
    else
        obj["explanation"] = e.explanation;
    if (e.model_prediction) obj["model_prediction"] = label_name(*e.model_prediction);
    return obj;
}

inline std::string corpus_to_jsonl(const Corpus& corpus) {
    std::string out;
    for (const Example& e : corpus.examples) {
        out += example_to_json(e).dump();
        out += '\n';
    }
    return out;
}

}  // namespace ialign
