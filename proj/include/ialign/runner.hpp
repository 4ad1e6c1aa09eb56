#pragma once

#include <cctype>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ialign/alignment.hpp"
#include "ialign/attribution.hpp"
#include "ialign/corpus.hpp"
#include "ialign/errors.hpp"
#include "ialign/io.hpp"
#include "ialign/model.hpp"
#include "ialign/oracle.hpp"
#include "ialign/rng.hpp"
#include "ialign/stopwords.hpp"

namespace ialign {

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

// One recorded configuration plus the input files fully determines every
// output, bitwise for the JSON reports.
struct RunConfig {
    std::string corpus_path;
    std::vector<std::string> model_paths;
    std::string informed_model_path;
    std::string expert_annotations_path;
    std::string stopwords_path;  // empty = built-in list
    std::vector<OracleKind> oracles = {OracleKind::hard};
    IGConfig ig;
    uint64_t seed = 0;
    bool wrong_only = false;
    bool debug_self_pairing = false;
    std::string output_dir;
};

// output_dir is deliberately not recorded: report bytes must not depend on
// where they are written, so runs into different directories can be compared.
inline nlohmann::json run_config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["corpus_path"] = c.corpus_path;
    j["model_paths"] = c.model_paths;
    j["informed_model_path"] = c.informed_model_path;
    j["expert_annotations_path"] = c.expert_annotations_path;
    j["stopwords"] = c.stopwords_path.empty() ? "builtin" : c.stopwords_path;
    std::vector<std::string> kinds;
    for (OracleKind k : c.oracles) kinds.emplace_back(oracle_kind_name(k));
    j["oracles"] = kinds;
    j["ig"] = {{"steps", c.ig.steps},
               {"baseline", baseline_name(c.ig.baseline)},
               {"target", target_name(c.ig.target)}};
    j["seed"] = c.seed;
    j["wrong_only"] = c.wrong_only;
    j["debug_self_pairing"] = c.debug_self_pairing;
    return j;
}

// ---------------------------------------------------------------------------
// Eligibility and pairing
// ---------------------------------------------------------------------------

// wrong_only keeps the examples the recorded model prediction got wrong;
// examples with no recorded prediction are dropped by the filter.
inline std::vector<size_t> eligible_indices(const Corpus& corpus, bool wrong_only) {
    std::vector<size_t> out;
    for (size_t i = 0; i < corpus.size(); ++i) {
        const Example& e = corpus.examples[i];
        if (wrong_only &&
            (!e.model_prediction || *e.model_prediction == e.gold_label))
            continue;
        out.push_back(i);
    }
    return out;
}

// Uniform donor over the other ids, mirroring random_pairing but for an
// arbitrary id set (the expert oracle pairs within the annotated subset).
inline std::map<std::string, std::string> random_id_pairing(
    const std::vector<std::string>& ids, Rng& rng) {
    if (ids.size() < 2)
        throw ValidationError("random_id_pairing: need at least 2 ids");
    std::map<std::string, std::string> pairing;
    for (size_t i = 0; i < ids.size(); ++i) {
        size_t donor = rng.uniform_index(ids.size() - 1);
        if (donor >= i) ++donor;
        pairing[ids[i]] = ids[donor];
    }
    return pairing;
}

// ---------------------------------------------------------------------------
// Per-oracle batches
// ---------------------------------------------------------------------------

struct OracleBatch {
    OracleKind kind = OracleKind::hard;
    std::vector<OracleVector> matched;
    std::vector<OracleVector> random_baseline;
};

inline OracleBatch compute_hard_oracles(const Corpus& corpus,
                                        const std::vector<size_t>& indices,
                                        const std::map<std::string, std::string>& pairing,
                                        const StopWordList& stops) {
    OracleBatch batch;
    batch.kind = OracleKind::hard;
    for (size_t i : indices) {
        const Example& e = corpus.examples[i];
        if (!e.has_explanation()) continue;
        const Example* donor = corpus.find(pairing.at(e.id));
        batch.matched.push_back(hard_oracle(e, e, stops));
        batch.random_baseline.push_back(hard_oracle(e, *donor, stops));
    }
    return batch;
}

inline OracleBatch compute_soft_oracles(const Classifier& informed_model,
                                        const Corpus& corpus,
                                        const std::vector<size_t>& indices,
                                        const std::map<std::string, std::string>& pairing,
                                        const SoftOracleOptions& opts) {
    OracleBatch batch;
    batch.kind = OracleKind::soft;
    for (size_t i : indices) {
        const Example& e = corpus.examples[i];
        if (!e.has_explanation()) continue;
        const Example* donor = corpus.find(pairing.at(e.id));
        batch.matched.push_back(soft_oracle(informed_model, e, opts));
        batch.random_baseline.push_back(soft_oracle(informed_model, e, *donor, opts));
    }
    return batch;
}

// The random baseline for the expert oracle is another annotated example's
// vote-share vector, cyclically resized to this example's token count, since
// expert vectors are positional rather than textual.
inline OracleBatch compute_expert_oracles(
    const Corpus& corpus, const std::vector<size_t>& indices,
    const std::vector<ExpertAnnotationSet>& annotation_sets,
    const std::map<std::string, std::string>& expert_pairing) {
    std::map<std::string, const ExpertAnnotationSet*> by_id;
    for (const ExpertAnnotationSet& s : annotation_sets) by_id.emplace(s.example_id, &s);

    OracleBatch batch;
    batch.kind = OracleKind::expert;
    for (size_t i : indices) {
        const Example& e = corpus.examples[i];
        const auto it = by_id.find(e.id);
        if (it == by_id.end()) continue;

        OracleVector matched = expert_oracle(*it->second);
        const size_t expected = concat_input(e).content_size();
        if (matched.per_token.size() != expected)
            throw ValidationError("expert annotation for example " + e.id + " has " +
                                  std::to_string(matched.per_token.size()) +
                                  " entries, input has " + std::to_string(expected) +
                                  " content tokens");

        const std::string& donor_id = expert_pairing.at(e.id);
        OracleVector random = expert_oracle(*by_id.at(donor_id));
        random.example_id = e.id;
        random.explanation_id = donor_id;
        random.per_token = resize_cyclic(random.per_token, expected);

        batch.matched.push_back(std::move(matched));
        batch.random_baseline.push_back(std::move(random));
    }
    return batch;
}

// ---------------------------------------------------------------------------
// Model-side computation
// ---------------------------------------------------------------------------

inline std::vector<AttributionVector> compute_attributions(
    const Classifier& model, const Corpus& corpus, const std::vector<size_t>& indices,
    const IGConfig& ig) {
    if (model.num_classes != kNumLabels)
        throw ValidationError("compute_attributions expects a 3-class model (" +
                              model.model_id + " has " +
                              std::to_string(model.num_classes) + " classes)");
    std::vector<AttributionVector> out;
    out.reserve(indices.size());
    for (size_t i : indices)
        out.push_back(model_importance(model, corpus.examples[i], ig));
    return out;
}

inline std::vector<AlignmentRecord> build_records(
    const std::vector<AttributionVector>& attributions, const OracleBatch& batch) {
    std::map<std::string, const AttributionVector*> by_id;
    for (const AttributionVector& a : attributions) by_id.emplace(a.example_id, &a);

    std::vector<AlignmentRecord> records;
    records.reserve(batch.matched.size());
    for (size_t i = 0; i < batch.matched.size(); ++i) {
        const auto it = by_id.find(batch.matched[i].example_id);
        if (it == by_id.end())
            throw ValidationError("no attribution for example " +
                                  batch.matched[i].example_id);
        records.push_back(
            align_example(*it->second, batch.matched[i], batch.random_baseline[i]));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Full alignment run
// ---------------------------------------------------------------------------

struct ModelOracleRun {
    std::string model_id;
    OracleKind kind = OracleKind::hard;
    std::vector<AlignmentRecord> records;
    DeltaAReport report;
};

struct ComparisonEntry {
    OracleKind kind = OracleKind::hard;
    ModelPairComparison cmp;
};

struct AlignOutcome {
    std::map<std::string, std::string> pairing;
    std::map<std::string, std::string> expert_pairing;
    std::vector<ModelOracleRun> runs;
    std::vector<ComparisonEntry> comparisons;
    std::string table_markdown;
    std::string table_csv;
};

// Runs the whole alignment experiment for a set of already loaded models.
// Pairings derive from the run seed alone, so every model is scored against
// the same random-explanation assignment.
inline AlignOutcome run_alignment(const RunConfig& config, const Corpus& corpus,
                                  const std::vector<Classifier>& models,
                                  const Classifier* informed_model,
                                  const std::vector<ExpertAnnotationSet>& experts,
                                  const StopWordList& stops) {
    if (models.empty()) throw ValidationError("run_alignment: no models given");
    if (config.oracles.empty()) throw ValidationError("run_alignment: no oracles requested");

    bool wants_soft = false, wants_expert = false, wants_text = false;
    for (OracleKind k : config.oracles) {
        if (k == OracleKind::soft) wants_soft = true;
        if (k == OracleKind::expert) wants_expert = true;
        if (k != OracleKind::expert) wants_text = true;
    }
    if (wants_soft && (!informed_model || informed_model->num_classes != 2 * kNumLabels))
        throw ValidationError(
            "run_alignment: soft oracle requires an explanation-informed 6-class model");
    if (wants_expert && experts.empty())
        throw ValidationError("run_alignment: expert oracle requires annotation sets");

    const std::vector<size_t> indices = eligible_indices(corpus, config.wrong_only);

    AlignOutcome outcome;
    if (wants_text) {
        if (config.debug_self_pairing) {
            outcome.pairing = self_pairing(corpus);
        } else {
            Rng rng = derive_stream(config.seed, "pairing");
            outcome.pairing = random_pairing(corpus, rng);
        }
    }
    if (wants_expert) {
        std::vector<std::string> annotated_ids;
        std::map<std::string, bool> has_set;
        for (const ExpertAnnotationSet& s : experts) has_set[s.example_id] = true;
        for (const Example& e : corpus.examples)
            if (has_set.count(e.id)) annotated_ids.push_back(e.id);
        if (config.debug_self_pairing) {
            for (const std::string& id : annotated_ids) outcome.expert_pairing[id] = id;
        } else {
            Rng rng = derive_stream(config.seed, "pairing/expert");
            outcome.expert_pairing = random_id_pairing(annotated_ids, rng);
        }
    }

    std::vector<OracleBatch> batches;
    for (OracleKind k : config.oracles) {
        switch (k) {
            case OracleKind::hard:
                batches.push_back(
                    compute_hard_oracles(corpus, indices, outcome.pairing, stops));
                break;
            case OracleKind::soft: {
                SoftOracleOptions opts;
                opts.ig = config.ig;
                batches.push_back(compute_soft_oracles(*informed_model, corpus, indices,
                                                       outcome.pairing, opts));
                break;
            }
            case OracleKind::expert:
                batches.push_back(compute_expert_oracles(corpus, indices, experts,
                                                         outcome.expert_pairing));
                break;
        }
    }

    std::vector<DeltaAReport> flat_reports;
    for (const Classifier& model : models) {
        const auto attributions = compute_attributions(model, corpus, indices, config.ig);
        for (const OracleBatch& batch : batches) {
            ModelOracleRun run;
            run.model_id = model.model_id;
            run.kind = batch.kind;
            run.records = build_records(attributions, batch);
            run.report = delta_A(run.records);
            run.report.model_id = model.model_id;
            run.report.seed = config.seed;
            flat_reports.push_back(run.report);
            outcome.runs.push_back(std::move(run));
        }
    }

    // Pairwise model comparisons per oracle kind; pairs that share too few
    // examples are simply not comparable and are left out.
    for (OracleKind k : config.oracles) {
        std::vector<const ModelOracleRun*> same_kind;
        for (const ModelOracleRun& run : outcome.runs)
            if (run.kind == k) same_kind.push_back(&run);
        for (size_t a = 0; a < same_kind.size(); ++a) {
            for (size_t b = a + 1; b < same_kind.size(); ++b) {
                try {
                    outcome.comparisons.push_back(
                        {k, model_pair_comparison(
                                same_kind[a]->model_id, same_kind[a]->records,
                                same_kind[b]->model_id, same_kind[b]->records)});
                } catch (const InsufficientDataError&) {
                }
            }
        }
    }

    outcome.table_markdown = render_markdown_table(flat_reports);
    outcome.table_csv = render_csv_table(flat_reports);
    return outcome;
}

// ---------------------------------------------------------------------------
// Artifact serialization
// ---------------------------------------------------------------------------

// Skipped records carry the reason and nothing else; usable records carry
// the correlations and no "skipped" key.
inline nlohmann::json alignment_record_to_json(const AlignmentRecord& rec) {
    nlohmann::json j;
    j["example_id"] = rec.example_id;
    j["oracle_kind"] = oracle_kind_name(rec.oracle_kind);
    j["random_explanation_id"] = rec.random_explanation_id;
    if (rec.skipped) {
        j["skipped"] = skip_reason_name(*rec.skipped);
    } else {
        j["r_matched"] = *rec.r_matched;
        j["r_random"] = *rec.r_random;
        j["c_matched"] = *rec.c_matched;
        j["c_random"] = *rec.c_random;
    }
    return j;
}

inline std::string alignment_records_to_jsonl(const std::vector<AlignmentRecord>& recs) {
    std::string out;
    for (const AlignmentRecord& rec : recs) {
        out += alignment_record_to_json(rec).dump();
        out += '\n';
    }
    return out;
}

inline nlohmann::json oracle_vector_to_json(const OracleVector& v) {
    return {{"example_id", v.example_id},
            {"oracle_kind", oracle_kind_name(v.kind)},
            {"explanation_id", v.explanation_id},
            {"per_token", v.per_token}};
}

inline std::string oracle_vectors_to_jsonl(const std::vector<OracleVector>& vs) {
    std::string out;
    for (const OracleVector& v : vs) {
        out += oracle_vector_to_json(v).dump();
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Artifact writing
// ---------------------------------------------------------------------------

inline std::string sanitize_filename(const std::string& s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')
                   ? c
                   : '_';
    return out.empty() ? std::string("unnamed") : out;
}

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// Every JSONL artifact gets a .meta.json sidecar embedding the RunConfig,
// since JSONL has no room for file-level metadata.
inline void write_jsonl_artifact(const std::filesystem::path& path,
                                 const std::string& content, const RunConfig& config,
                                 const std::string& format) {
    atomic_write(path, content);
    std::filesystem::path meta = path;
    meta.replace_extension(".meta.json");
    nlohmann::json j;
    j["artifact"] = path.filename().string();
    j["format"] = format;
    j["seed"] = config.seed;
    j["run_config"] = run_config_to_json(config);
    atomic_write(meta, dump_json(j));
}

inline std::vector<std::filesystem::path> write_align_outputs(
    const std::filesystem::path& out_dir, const RunConfig& config,
    const AlignOutcome& outcome) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    for (const ModelOracleRun& run : outcome.runs) {
        const std::string stem =
            sanitize_filename(run.model_id) + "_" + oracle_kind_name(run.kind);

        const auto records_path = out_dir / ("records_" + stem + ".jsonl");
        write_jsonl_artifact(records_path, alignment_records_to_jsonl(run.records),
                             config, "ialign-records-v1");
        written.push_back(records_path);

        nlohmann::json report = report_to_json(run.report);
        report["run_config"] = run_config_to_json(config);
        const auto report_path = out_dir / ("report_" + stem + ".json");
        atomic_write(report_path, dump_json(report));
        written.push_back(report_path);
    }

    nlohmann::json comparisons = nlohmann::json::array();
    for (const ComparisonEntry& entry : outcome.comparisons) {
        nlohmann::json c;
        c["oracle_kind"] = oracle_kind_name(entry.kind);
        c["model_a"] = entry.cmp.model_a;
        c["model_b"] = entry.cmp.model_b;
        c["n_shared"] = entry.cmp.n_shared;
        c["mean_diff_fisher"] = entry.cmp.mean_diff;
        c["df"] = entry.cmp.df;
        c["t"] = entry.cmp.t ? nlohmann::json(*entry.cmp.t) : nlohmann::json(nullptr);
        c["p_two_sided"] = entry.cmp.p_two_sided ? nlohmann::json(*entry.cmp.p_two_sided)
                                                 : nlohmann::json(nullptr);
        comparisons.push_back(c);
    }
    nlohmann::json cmp_doc;
    cmp_doc["comparisons"] = comparisons;
    cmp_doc["run_config"] = run_config_to_json(config);
    cmp_doc["seed"] = config.seed;
    const auto cmp_path = out_dir / "comparisons.json";
    atomic_write(cmp_path, dump_json(cmp_doc));
    written.push_back(cmp_path);

    nlohmann::json pairing_doc;
    pairing_doc["pairing"] = outcome.pairing;
    pairing_doc["expert_pairing"] = outcome.expert_pairing;
    pairing_doc["seed"] = config.seed;
    pairing_doc["run_config"] = run_config_to_json(config);
    const auto pairing_path = out_dir / "pairing.json";
    atomic_write(pairing_path, dump_json(pairing_doc));
    written.push_back(pairing_path);

    const auto md_path = out_dir / "table.md";
    atomic_write(md_path, outcome.table_markdown);
    written.push_back(md_path);
    const auto csv_path = out_dir / "table.csv";
    atomic_write(csv_path, outcome.table_csv);
    written.push_back(csv_path);

    return written;
}

}  // namespace ialign
