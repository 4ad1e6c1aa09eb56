#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "ialign/attribution.hpp"
#include "ialign/corpus.hpp"
#include "ialign/errors.hpp"
#include "ialign/io.hpp"
#include "ialign/model.hpp"
#include "ialign/rng.hpp"

namespace ialign {

// ---------------------------------------------------------------------------
// Oracle vectors
// ---------------------------------------------------------------------------

enum class OracleKind { hard, soft, expert };

inline const char* oracle_kind_name(OracleKind k) {
    switch (k) {
        case OracleKind::hard: return "hard";
        case OracleKind::soft: return "soft";
        case OracleKind::expert: return "expert";
    }
    return "?";
}

inline OracleKind oracle_kind_from_name(const std::string& s) {
    if (s == "hard") return OracleKind::hard;
    if (s == "soft") return OracleKind::soft;
    if (s == "expert") return OracleKind::expert;
    throw ValidationError("unknown oracle kind \"" + s + "\"");
}

// Importance implied by an explanation, aligned to the example's
// non-separator input tokens. explanation_id records whose explanation was
// scored: the example's own under matched scoring, the pairing target under
// the random baseline.
struct OracleVector {
    std::string example_id;
    OracleKind kind = OracleKind::hard;
    std::string explanation_id;
    std::vector<double> per_token;

    bool operator==(const OracleVector&) const = default;
};

// ---------------------------------------------------------------------------
// Hard oracle: binary token overlap, stop words suppressed
// ---------------------------------------------------------------------------

// Entry i is 1 iff the lowercased input token occurs among the lowercased
// explanation tokens and is not a stop word. Separator positions are
// excluded from the output. Matching is exact string equality.
inline OracleVector hard_oracle(const TokenSequence& input,
                                const TokenSequence& explanation,
                                const StopWordList& stops) {
    if (explanation.empty())
        throw ValidationError("hard_oracle: empty explanation");
    std::set<std::string> vocab;
    for (const std::string& t : explanation.tokens) vocab.insert(to_lower_ascii(t));

    OracleVector out;
    out.kind = OracleKind::hard;
    out.per_token.reserve(input.content_size());
    for (size_t i = 0; i < input.size(); ++i) {
        if (input.is_separator(i)) continue;
        const std::string key = to_lower_ascii(input.tokens[i]);
        const bool overlaps = vocab.count(key) > 0 && !stops.contains(key);
        out.per_token.push_back(overlaps ? 1.0 : 0.0);
    }
    return out;
}

inline OracleVector hard_oracle(const Example& example, const Example& donor,
                                const StopWordList& stops) {
    OracleVector out =
        hard_oracle(concat_input(example), tokenize(donor.explanation), stops);
    out.example_id = example.id;
    out.explanation_id = donor.id;
    return out;
}

// ---------------------------------------------------------------------------
// Soft oracle: attribution of an explanation-informed model
// ---------------------------------------------------------------------------

struct SoftOracleOptions {
    IGConfig ig;
    // Six-way IG target is (gold label, matched = true) by default, also
    // when scoring a randomly paired explanation; set false to target the
    // mismatched bucket instead.
    bool target_matched = true;
};

// Absolute IG of the informed model over the concatenation (input,
// separator, explanation), restricted to the input's non-separator
// positions. Explanation-token attributions are discarded.
inline OracleVector soft_oracle(const Classifier& informed_model, const Example& example,
                                const Example& donor,
                                const SoftOracleOptions& opts = {}) {
    if (informed_model.num_classes != 2 * kNumLabels)
        throw ValidationError("soft_oracle requires a 6-class explanation-informed model");
    if (!donor.has_explanation())
        throw ValidationError("soft_oracle: example " + donor.id + " has no explanation");

    const TokenSequence input = concat_input(example);
    const TokenSequence informed =
        build_informed_sequence(input, tokenize(donor.explanation));
    const int target = SixWayLabel{example.gold_label, opts.target_matched}.index();
    const IGResult ig = integrated_gradients(informed_model, informed, target, opts.ig);

    OracleVector out;
    out.kind = OracleKind::soft;
    out.example_id = example.id;
    out.explanation_id = donor.id;
    out.per_token.reserve(input.content_size());
    for (size_t i = 0; i < input.size(); ++i)
        if (!input.is_separator(i)) out.per_token.push_back(std::abs(ig.per_position[i]));
    return out;
}

inline OracleVector soft_oracle(const Classifier& informed_model, const Example& example,
                                const SoftOracleOptions& opts = {}) {
    return soft_oracle(informed_model, example, example, opts);
}

// ---------------------------------------------------------------------------
// Expert oracle: annotator vote shares
// ---------------------------------------------------------------------------

struct ExpertAnnotationSet {
    std::string example_id;
    std::vector<std::string> annotator_ids;
    std::vector<std::vector<int>> votes;  // one binary vector per annotator

    size_t annotator_count() const { return votes.size(); }
};

// Entry i is the fraction of annotators who marked token i important.
inline OracleVector expert_oracle(const ExpertAnnotationSet& annotations) {
    const size_t n_annotators = annotations.votes.size();
    if (n_annotators == 0)
        throw ValidationError("expert_oracle: no annotators for example " +
                              annotations.example_id);
    const size_t len = annotations.votes.front().size();
    for (const auto& v : annotations.votes)
        if (v.size() != len)
            throw ValidationError("expert_oracle: annotator vectors disagree in length "
                                  "for example " +
                                  annotations.example_id);

    OracleVector out;
    out.kind = OracleKind::expert;
    out.example_id = annotations.example_id;
    out.explanation_id = annotations.example_id;
    out.per_token.resize(len, 0.0);
    for (size_t i = 0; i < len; ++i) {
        int sum = 0;
        for (const auto& v : annotations.votes) {
            if (v[i] != 0 && v[i] != 1)
                throw ValidationError("expert_oracle: votes must be 0 or 1 (example " +
                                      annotations.example_id + ")");
            sum += v[i];
        }
        out.per_token[i] = static_cast<double>(sum) / static_cast<double>(n_annotators);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Expert annotation JSONL
// ---------------------------------------------------------------------------

// One line per (example, annotator): {"id", "annotator", "important": [0|1...]}.
// Sets are returned in first-appearance order of the example id.
inline std::vector<ExpertAnnotationSet> load_expert_annotations(
    const std::filesystem::path& path) {
    std::vector<ExpertAnnotationSet> sets;
    std::map<std::string, size_t> index;
    std::set<std::pair<std::string, std::string>> seen;

    const std::vector<std::string> lines = read_lines(path);
    for (size_t idx = 0; idx < lines.size(); ++idx) {
        const size_t line_no = idx + 1;
        if (lines[idx].empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(lines[idx]);
        } catch (const nlohmann::json::parse_error& err) {
            throw ParseError(line_no, std::string("malformed JSON: ") + err.what());
        }
        std::string id, annotator;
        std::vector<int> important;
        try {
            id = j.at("id").get<std::string>();
            annotator = j.at("annotator").get<std::string>();
            important = j.at("important").get<std::vector<int>>();
        } catch (const nlohmann::json::exception& err) {
            throw ParseError(line_no, std::string("bad annotation record: ") + err.what());
        }
        if (important.empty())
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": empty importance vector");
        for (int v : important)
            if (v != 0 && v != 1)
                throw ValidationError("line " + std::to_string(line_no) +
                                      ": votes must be 0 or 1");
        if (!seen.emplace(id, annotator).second)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": duplicate annotation for example \"" + id +
                                  "\" by annotator \"" + annotator + "\"");

        const auto [it, inserted] = index.emplace(id, sets.size());
        if (inserted) {
            ExpertAnnotationSet s;
            s.example_id = id;
            sets.push_back(std::move(s));
        }
        ExpertAnnotationSet& s = sets[it->second];
        if (!s.votes.empty() && s.votes.front().size() != important.size())
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": vector length disagrees with earlier annotators of "
                                  "example \"" +
                                  id + "\"");
        s.annotator_ids.push_back(std::move(annotator));
        s.votes.push_back(std::move(important));
    }
    return sets;
}

inline std::string expert_annotations_to_jsonl(
    const std::vector<ExpertAnnotationSet>& sets) {
    std::string out;
    for (const ExpertAnnotationSet& s : sets) {
        for (size_t k = 0; k < s.votes.size(); ++k) {
            const nlohmann::json j = {{"id", s.example_id},
                                      {"annotator", s.annotator_ids[k]},
                                      {"important", s.votes[k]}};
            out += j.dump();
            out += '\n';
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random explanation pairing
// ---------------------------------------------------------------------------

// Uniform donor among the OTHER explanation-bearing examples, one draw per
// eligible example in corpus order. The map is computed once per run and
// shared across models and oracle kinds.
inline std::map<std::string, std::string> random_pairing(const Corpus& corpus, Rng& rng) {
    std::vector<const Example*> eligible;
    for (const Example& e : corpus.examples)
        if (e.has_explanation()) eligible.push_back(&e);
    if (eligible.size() < 2)
        throw ValidationError("random_pairing: need at least 2 examples with explanations");

    std::map<std::string, std::string> pairing;
    for (size_t i = 0; i < eligible.size(); ++i) {
        size_t donor = rng.uniform_index(eligible.size() - 1);
        if (donor >= i) ++donor;
        pairing[eligible[i]->id] = eligible[donor]->id;
    }
    return pairing;
}

// Debug pairing that maps every eligible example to itself, collapsing the
// random baseline onto the matched scores (delta_A becomes exactly 0).
inline std::map<std::string, std::string> self_pairing(const Corpus& corpus) {
    std::map<std::string, std::string> pairing;
    for (const Example& e : corpus.examples)
        if (e.has_explanation()) pairing[e.id] = e.id;
    return pairing;
}

// Tile or truncate v to length n; used to transplant expert vectors onto a
// differently sized example for the random baseline.
inline std::vector<double> resize_cyclic(const std::vector<double>& v, size_t n) {
    if (v.empty()) throw ValidationError("resize_cyclic: empty vector");
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = v[i % v.size()];
    return out;
}

}  // namespace ialign
