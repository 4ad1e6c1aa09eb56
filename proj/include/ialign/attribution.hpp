#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ialign/corpus.hpp"
#include "ialign/errors.hpp"
#include "ialign/io.hpp"
#include "ialign/model.hpp"

namespace ialign {

// ---------------------------------------------------------------------------
// Integrated gradients
// ---------------------------------------------------------------------------

enum class BaselineKind { zero_embedding, pad_embedding };
enum class TargetKind { gold_label, predicted_label };

inline const char* baseline_name(BaselineKind b) {
    return b == BaselineKind::zero_embedding ? "zero" : "pad";
}

inline BaselineKind baseline_from_name(const std::string& s) {
    if (s == "zero") return BaselineKind::zero_embedding;
    if (s == "pad") return BaselineKind::pad_embedding;
    throw ValidationError("unknown baseline \"" + s + "\" (expected zero or pad)");
}

inline const char* target_name(TargetKind t) {
    return t == TargetKind::gold_label ? "gold" : "predicted";
}

inline TargetKind target_from_name(const std::string& s) {
    if (s == "gold") return TargetKind::gold_label;
    if (s == "predicted") return TargetKind::predicted_label;
    throw ValidationError("unknown target \"" + s + "\" (expected gold or predicted)");
}

struct IGConfig {
    int steps = 256;
    BaselineKind baseline = BaselineKind::zero_embedding;
    TargetKind target = TargetKind::gold_label;
};

// Raw engine output: signed attributions for every position, separators
// included, plus the completeness bookkeeping.
struct IGResult {
    std::vector<double> per_position;
    double completeness_gap = 0.0;
    double score_input = 0.0;
    double score_baseline = 0.0;

    double signed_sum() const {
        double s = 0.0;
        for (double v : per_position) s += v;
        return s;
    }
};

// Straight-line path integral, midpoint rule: coordinate attribution is
// (x - x') times the average of dF/dcoordinate at alphas (k+0.5)/steps,
// where F is the pre-softmax score of the target class. Token attribution
// sums that token's coordinates.
inline IGResult integrated_gradients(const Classifier& model, const TokenSequence& tokens,
                                     int target_class, const IGConfig& config = {}) {
    if (tokens.empty()) throw ValidationError("integrated_gradients: empty input");
    if (config.steps < 1) throw ValidationError("integrated_gradients: steps must be >= 1");

    const Matrix x = model.embed(tokens);
    const size_t n = x.rows;
    const size_t dim = x.cols;

    Matrix baseline(n, dim);
    if (config.baseline == BaselineKind::pad_embedding) {
        const auto pad = model.embedding.weights.row(EmbeddingTable::kPadIndex);
        for (size_t i = 0; i < n; ++i)
            std::copy(pad.begin(), pad.end(), baseline.row(i).begin());
    }

    Matrix avg_grad(n, dim);
    Matrix point(n, dim);
    for (int k = 0; k < config.steps; ++k) {
        const double alpha = (static_cast<double>(k) + 0.5) / config.steps;
        for (size_t i = 0; i < x.data.size(); ++i)
            point.data[i] = baseline.data[i] + alpha * (x.data[i] - baseline.data[i]);
        const Matrix grad = model.gradient_wrt_embeddings(point, target_class);
        for (size_t i = 0; i < avg_grad.data.size(); ++i) avg_grad.data[i] += grad.data[i];
    }
    for (double& v : avg_grad.data) v /= config.steps;

    IGResult result;
    result.per_position.resize(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double token_sum = 0.0;
        for (size_t d = 0; d < dim; ++d)
            token_sum += (x.at(i, d) - baseline.at(i, d)) * avg_grad.at(i, d);
        result.per_position[i] = token_sum;
    }
    result.score_input = model.score(x, target_class);
    result.score_baseline = model.score(baseline, target_class);
    result.completeness_gap =
        std::abs(result.signed_sum() - (result.score_input - result.score_baseline));
    return result;
}

// ---------------------------------------------------------------------------
// Token-level model importance
// ---------------------------------------------------------------------------

struct AttributionVector {
    std::string example_id;
    int target_class = 0;
    std::vector<double> per_token;  // absolute values, separators dropped
    double completeness_gap = 0.0;

    bool operator==(const AttributionVector&) const = default;
};

// Absolute IG toward the target label over the premise/hypothesis
// concatenation; the separator position is computed but never reported.
inline AttributionVector model_importance(const Classifier& model, const Example& example,
                                          const IGConfig& config = {}) {
    const TokenSequence seq = concat_input(example);
    int target = label_index(example.gold_label);
    if (config.target == TargetKind::predicted_label)
        target = model.predict_class(model.embed(seq)) % kNumLabels;

    const IGResult ig = integrated_gradients(model, seq, target, config);

    AttributionVector av;
    av.example_id = example.id;
    av.target_class = target;
    av.completeness_gap = ig.completeness_gap;
    av.per_token.reserve(seq.content_size());
    for (size_t i = 0; i < seq.size(); ++i)
        if (!seq.is_separator(i)) av.per_token.push_back(std::abs(ig.per_position[i]));
    return av;
}

// ---------------------------------------------------------------------------
// JSONL persistence
// ---------------------------------------------------------------------------

inline nlohmann::json attribution_to_json(const AttributionVector& av) {
    return {{"id", av.example_id},
            {"target_class", av.target_class},
            {"per_token", av.per_token},
            {"completeness_gap", av.completeness_gap}};
}

inline AttributionVector attribution_from_json(const nlohmann::json& j, size_t line_no) {
    if (!j.is_object()) throw ParseError(line_no, "attribution line is not an object");
    AttributionVector av;
    try {
        av.example_id = j.at("id").get<std::string>();
        av.target_class = j.at("target_class").get<int>();
        av.per_token = j.at("per_token").get<std::vector<double>>();
        av.completeness_gap = j.at("completeness_gap").get<double>();
    } catch (const nlohmann::json::exception& err) {
        throw ParseError(line_no, std::string("bad attribution record: ") + err.what());
    }
    for (double v : av.per_token)
        if (v < 0.0)
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": negative importance for example " + av.example_id);
    return av;
}

inline std::string attributions_to_jsonl(const std::vector<AttributionVector>& avs) {
    std::string out;
    for (const AttributionVector& av : avs) {
        out += attribution_to_json(av).dump();
        out += '\n';
    }
    return out;
}

inline std::vector<AttributionVector> load_attributions(const std::filesystem::path& path) {
    std::vector<AttributionVector> out;
    const std::vector<std::string> lines = read_lines(path);
    for (size_t idx = 0; idx < lines.size(); ++idx) {
        if (lines[idx].empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(lines[idx]);
        } catch (const nlohmann::json::parse_error& err) {
            throw ParseError(idx + 1, std::string("malformed JSON: ") + err.what());
        }
        out.push_back(attribution_from_json(j, idx + 1));
    }
    return out;
}

}  // namespace ialign
