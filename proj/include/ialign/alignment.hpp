#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ialign/attribution.hpp"
#include "ialign/errors.hpp"
#include "ialign/oracle.hpp"
#include "ialign/stats.hpp"

namespace ialign {

// ---------------------------------------------------------------------------
// Per-example alignment
// ---------------------------------------------------------------------------

enum class SkipReason { zero_variance_model, zero_variance_oracle, too_short };

inline const char* skip_reason_name(SkipReason r) {
    switch (r) {
        case SkipReason::zero_variance_model: return "zero_variance_model";
        case SkipReason::zero_variance_oracle: return "zero_variance_oracle";
        case SkipReason::too_short: return "too_short";
    }
    return "?";
}

// Correlation of model importance with the matched and the randomly paired
// oracle vector. Skipped records carry a reason and no correlation values.
struct AlignmentRecord {
    std::string example_id;
    OracleKind oracle_kind = OracleKind::hard;
    std::string random_explanation_id;
    std::optional<SkipReason> skipped;
    std::optional<double> r_matched;
    std::optional<double> r_random;
    std::optional<double> c_matched;
    std::optional<double> c_random;

    bool usable() const { return !skipped.has_value(); }
    double diff() const { return *c_matched - *c_random; }
};

// Degenerate inputs become counted skips rather than errors: a hard oracle
// with no overlap is a property of the example, not a caller bug. Vectors
// shorter than 3 are skipped because correlation over 2 points is +-1 noise.
inline AlignmentRecord align_example(const AttributionVector& model_imp,
                                     const OracleVector& matched,
                                     const OracleVector& random_baseline) {
    if (matched.example_id != model_imp.example_id ||
        random_baseline.example_id != model_imp.example_id)
        throw ValidationError("align_example: joined records disagree on example id (" +
                              model_imp.example_id + ")");
    if (matched.per_token.size() != model_imp.per_token.size() ||
        random_baseline.per_token.size() != model_imp.per_token.size())
        throw ValidationError("align_example: vector lengths differ for example " +
                              model_imp.example_id);

    AlignmentRecord rec;
    rec.example_id = model_imp.example_id;
    rec.oracle_kind = matched.kind;
    rec.random_explanation_id = random_baseline.explanation_id;

    if (model_imp.per_token.size() < 3) {
        rec.skipped = SkipReason::too_short;
        return rec;
    }
    if (is_constant(model_imp.per_token)) {
        rec.skipped = SkipReason::zero_variance_model;
        return rec;
    }
    if (is_constant(matched.per_token) || is_constant(random_baseline.per_token)) {
        rec.skipped = SkipReason::zero_variance_oracle;
        return rec;
    }

    rec.r_matched = pearson(model_imp.per_token, matched.per_token);
    rec.r_random = pearson(model_imp.per_token, random_baseline.per_token);
    rec.c_matched = fisher(*rec.r_matched);
    rec.c_random = fisher(*rec.r_random);
    return rec;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct DeltaAReport {
    std::string model_id;
    OracleKind oracle_kind = OracleKind::hard;
    uint64_t seed = 0;
    size_t n_used = 0;
    size_t n_skipped = 0;
    std::map<std::string, size_t> skip_reasons;
    double mean_diff_fisher = 0.0;
    double delta_A = 0.0;
    int df = 0;
    // Absent when the differences have zero variance but nonzero mean; the
    // t statistic is undefined there and the report says so instead of
    // inventing one.
    std::optional<double> t;
    std::optional<double> p_one_sided;
    std::optional<double> p_two_sided;
    bool variance_degenerate = false;
};

// Mean Fisher-scale difference mapped back through tanh, with a paired
// one-sided t-test of the differences against zero.
inline DeltaAReport delta_A(const std::vector<AlignmentRecord>& records) {
    DeltaAReport report;
    std::vector<double> diffs;
    for (const AlignmentRecord& rec : records) {
        if (!rec.usable()) {
            ++report.n_skipped;
            ++report.skip_reasons[skip_reason_name(*rec.skipped)];
            continue;
        }
        if (diffs.empty()) {
            report.oracle_kind = rec.oracle_kind;
        } else if (rec.oracle_kind != report.oracle_kind) {
            throw ValidationError("delta_A: records mix oracle kinds");
        }
        diffs.push_back(rec.diff());
    }
    if (diffs.size() < 2)
        throw InsufficientDataError("delta_A: need >= 2 usable records, have " +
                                    std::to_string(diffs.size()));

    report.n_used = diffs.size();
    report.mean_diff_fisher = mean(diffs);
    report.delta_A = std::tanh(report.mean_diff_fisher);
    report.df = static_cast<int>(diffs.size()) - 1;

    if (is_constant(diffs)) {
        if (diffs.front() == 0.0) {
            // All matched and random correlations coincide: no effect at all.
            report.t = 0.0;
            report.p_one_sided = 0.5;
            report.p_two_sided = 1.0;
        } else {
            report.variance_degenerate = true;
        }
        return report;
    }

    const TTestResult tt = paired_t_test(diffs);
    report.t = tt.t;
    report.p_one_sided = tt.p_one_sided;
    report.p_two_sided = tt.p_two_sided;
    report.df = tt.df;
    return report;
}

// ---------------------------------------------------------------------------
// Cross-model and cross-oracle analyses
// ---------------------------------------------------------------------------

// Pearson between model accuracies and their alignment scores, with the
// exact t-transform p-value.
inline CorrelationTest accuracy_alignment_correlation(
    const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw InsufficientDataError("accuracy_alignment_correlation: need >= 3 points");
    std::vector<double> xs, ys;
    xs.reserve(points.size());
    ys.reserve(points.size());
    for (const auto& [x, y] : points) {
        xs.push_back(x);
        ys.push_back(y);
    }
    const double r = pearson(xs, ys);
    return correlation_p_value(r, points.size());
}

struct OracleAgreementEntry {
    std::string pair;
    double spearman_r = 0.0;
    std::optional<double> p_two_sided;
    size_t n_examples = 0;
    size_t n_tokens = 0;
};

struct OracleAgreement {
    std::vector<OracleAgreementEntry> entries;  // hard_expert, soft_expert, hard_soft

    const OracleAgreementEntry& entry(const std::string& pair) const {
        for (const auto& e : entries)
            if (e.pair == pair) return e;
        throw IndexError("no oracle agreement entry \"" + pair + "\"");
    }
};

namespace detail {

inline OracleAgreementEntry agreement_pair(const std::string& name,
                                           const std::vector<OracleVector>& a,
                                           const std::vector<OracleVector>& b) {
    std::map<std::string, const OracleVector*> by_id;
    for (const OracleVector& v : a) by_id.emplace(v.example_id, &v);

    OracleAgreementEntry entry;
    entry.pair = name;
    std::vector<double> pooled_a, pooled_b;
    std::vector<const OracleVector*> matches;
    std::vector<const OracleVector*> partners;
    for (const OracleVector& v : b) {
        const auto it = by_id.find(v.example_id);
        if (it == by_id.end()) continue;
        matches.push_back(it->second);
        partners.push_back(&v);
    }
    // Deterministic pooling order regardless of input order.
    std::vector<size_t> order(matches.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
        return matches[x]->example_id < matches[y]->example_id;
    });
    for (size_t idx : order) {
        const OracleVector& va = *matches[idx];
        const OracleVector& vb = *partners[idx];
        if (va.per_token.size() != vb.per_token.size())
            throw ValidationError("oracle_agreement: vector lengths differ for example " +
                                  va.example_id);
        pooled_a.insert(pooled_a.end(), va.per_token.begin(), va.per_token.end());
        pooled_b.insert(pooled_b.end(), vb.per_token.begin(), vb.per_token.end());
        ++entry.n_examples;
    }
    if (entry.n_examples == 0)
        throw InsufficientDataError("oracle_agreement: no common examples for " + name);

    entry.n_tokens = pooled_a.size();
    entry.spearman_r = spearman(pooled_a, pooled_b);
    // Large-sample p via the t transform of the rank correlation.
    entry.p_two_sided = correlation_p_value(entry.spearman_r, entry.n_tokens).p_two_sided;
    return entry;
}

}  // namespace detail

// Pooled token-level Spearman agreement between oracle kinds, pairwise over
// the examples each pair shares.
inline OracleAgreement oracle_agreement(const std::vector<OracleVector>& hard,
                                        const std::vector<OracleVector>& soft,
                                        const std::vector<OracleVector>& expert) {
    OracleAgreement out;
    out.entries.push_back(detail::agreement_pair("hard_expert", hard, expert));
    out.entries.push_back(detail::agreement_pair("soft_expert", soft, expert));
    out.entries.push_back(detail::agreement_pair("hard_soft", hard, soft));
    return out;
}

// Paired t-test between two models' per-example Fisher differences on the
// examples both models scored; the desk-scale substitute for a mixed model.
struct ModelPairComparison {
    std::string model_a;
    std::string model_b;
    size_t n_shared = 0;
    double mean_diff = 0.0;  // mean of (diff_a - diff_b)
    std::optional<double> t;
    std::optional<double> p_two_sided;
    int df = 0;
};

inline ModelPairComparison model_pair_comparison(
    const std::string& model_a, const std::vector<AlignmentRecord>& records_a,
    const std::string& model_b, const std::vector<AlignmentRecord>& records_b) {
    std::map<std::string, double> diffs_a;
    for (const AlignmentRecord& rec : records_a)
        if (rec.usable()) diffs_a.emplace(rec.example_id, rec.diff());

    std::vector<double> paired;
    for (const AlignmentRecord& rec : records_b) {
        if (!rec.usable()) continue;
        const auto it = diffs_a.find(rec.example_id);
        if (it != diffs_a.end()) paired.push_back(it->second - rec.diff());
    }

    ModelPairComparison cmp;
    cmp.model_a = model_a;
    cmp.model_b = model_b;
    cmp.n_shared = paired.size();
    if (paired.size() < 2)
        throw InsufficientDataError("model_pair_comparison: fewer than 2 shared examples");
    cmp.mean_diff = mean(paired);
    cmp.df = static_cast<int>(paired.size()) - 1;
    if (!is_constant(paired)) {
        const TTestResult tt = paired_t_test(paired);
        cmp.t = tt.t;
        cmp.p_two_sided = tt.p_two_sided;
        cmp.df = tt.df;
    } else if (paired.front() == 0.0) {
        cmp.t = 0.0;
        cmp.p_two_sided = 1.0;
    }
    return cmp;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

// Star convention: *** p < 0.001, ** p < 0.01, * p < 0.05.
inline std::string significance_stars(std::optional<double> p) {
    if (!p) return "";
    if (*p < 0.001) return "***";
    if (*p < 0.01) return "**";
    if (*p < 0.05) return "*";
    return "";
}

namespace detail {

inline std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace detail

// Rows are models, columns are oracle kinds, cells are delta_A with stars
// from the one-sided test.
inline std::string render_markdown_table(const std::vector<DeltaAReport>& reports) {
    std::vector<std::string> models;
    std::vector<OracleKind> oracles;
    for (const DeltaAReport& r : reports) {
        if (std::find(models.begin(), models.end(), r.model_id) == models.end())
            models.push_back(r.model_id);
        if (std::find(oracles.begin(), oracles.end(), r.oracle_kind) == oracles.end())
            oracles.push_back(r.oracle_kind);
    }
    auto find_report = [&](const std::string& model,
                           OracleKind kind) -> const DeltaAReport* {
        for (const DeltaAReport& r : reports)
            if (r.model_id == model && r.oracle_kind == kind) return &r;
        return nullptr;
    };

    std::string out = "| model |";
    for (OracleKind k : oracles) out += std::string(" ") + oracle_kind_name(k) + " |";
    out += "\n|---|";
    for (size_t i = 0; i < oracles.size(); ++i) out += "---|";
    out += "\n";
    for (const std::string& model : models) {
        out += "| " + model + " |";
        for (OracleKind k : oracles) {
            const DeltaAReport* r = find_report(model, k);
            if (!r) {
                out += " n/a |";
            } else {
                out += " " + detail::fixed3(r->delta_A) + significance_stars(r->p_one_sided);
                if (r->variance_degenerate) out += " (degenerate)";
                out += " |";
            }
        }
        out += "\n";
    }
    return out;
}

inline std::string render_csv_table(const std::vector<DeltaAReport>& reports) {
    std::string out =
        "model_id,oracle_kind,delta_A,mean_diff_fisher,t,p_one_sided,p_two_sided,df,"
        "n_used,n_skipped,stars\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? detail::fixed3(*v) : std::string("");
    };
    for (const DeltaAReport& r : reports) {
        out += r.model_id;
        out += ',';
        out += oracle_kind_name(r.oracle_kind);
        out += ',';
        out += detail::fixed3(r.delta_A);
        out += ',';
        out += detail::fixed3(r.mean_diff_fisher);
        out += ',';
        out += opt(r.t);
        out += ',';
        out += opt(r.p_one_sided);
        out += ',';
        out += opt(r.p_two_sided);
        out += ',';
        out += std::to_string(r.df);
        out += ',';
        out += std::to_string(r.n_used);
        out += ',';
        out += std::to_string(r.n_skipped);
        out += ',';
        out += significance_stars(r.p_one_sided);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reference values
// ---------------------------------------------------------------------------

// Published full-scale reference numbers carried along in reports for
// context. They come from fine-tuned transformer experiments on adversarial
// NLI data and are not reproduction targets for these reference models.
struct ReferenceValues {
    double delta_A_hard = 0.21;
    double delta_A_soft = 0.11;
    double delta_A_expert = 0.39;
    double spearman_hard_expert = 0.24;
    double spearman_soft_expert = 0.14;
    double spearman_hard_soft = 0.11;
};

inline nlohmann::json reference_values_json() {
    const ReferenceValues ref;
    return {{"delta_A",
             {{"hard", ref.delta_A_hard},
              {"soft", ref.delta_A_soft},
              {"expert", ref.delta_A_expert}}},
            {"oracle_spearman",
             {{"hard_expert", ref.spearman_hard_expert},
              {"soft_expert", ref.spearman_soft_expert},
              {"hard_soft", ref.spearman_hard_soft}}},
            {"note", "full-scale reference values, not reproduction targets"}};
}

// ---------------------------------------------------------------------------
// Report JSON
// ---------------------------------------------------------------------------

inline DeltaAReport report_from_json(const nlohmann::json& j) {
    DeltaAReport r;
    try {
        r.model_id = j.at("model_id").get<std::string>();
        r.oracle_kind = oracle_kind_from_name(j.at("oracle_kind").get<std::string>());
        r.n_used = j.at("n_used").get<size_t>();
        r.n_skipped = j.at("n_skipped").get<size_t>();
        if (j.contains("skip_reasons"))
            r.skip_reasons = j.at("skip_reasons").get<std::map<std::string, size_t>>();
        r.delta_A = j.at("delta_A").get<double>();
        r.mean_diff_fisher = j.at("mean_diff_fisher").get<double>();
        r.df = j.at("df").get<int>();
        if (!j.at("t").is_null()) r.t = j.at("t").get<double>();
        if (!j.at("p_one_sided").is_null())
            r.p_one_sided = j.at("p_one_sided").get<double>();
        if (!j.at("p_two_sided").is_null())
            r.p_two_sided = j.at("p_two_sided").get<double>();
        if (j.contains("variance_degenerate"))
            r.variance_degenerate = j.at("variance_degenerate").get<bool>();
        r.seed = j.at("seed").get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed report json: ") + e.what());
    }
    return r;
}

inline nlohmann::json report_to_json(const DeltaAReport& r) {
    nlohmann::json j;
    j["model_id"] = r.model_id;
    j["oracle_kind"] = oracle_kind_name(r.oracle_kind);
    j["n_used"] = r.n_used;
    j["n_skipped"] = r.n_skipped;
    j["skip_reasons"] = r.skip_reasons;
    j["delta_A"] = r.delta_A;
    j["mean_diff_fisher"] = r.mean_diff_fisher;
    j["df"] = r.df;
    j["t"] = r.t ? nlohmann::json(*r.t) : nlohmann::json(nullptr);
    j["p_one_sided"] =
        r.p_one_sided ? nlohmann::json(*r.p_one_sided) : nlohmann::json(nullptr);
    j["p_two_sided"] =
        r.p_two_sided ? nlohmann::json(*r.p_two_sided) : nlohmann::json(nullptr);
    j["variance_degenerate"] = r.variance_degenerate;
    j["seed"] = r.seed;
    j["reference_only"] = reference_values_json();
    return j;
}

}  // namespace ialign
