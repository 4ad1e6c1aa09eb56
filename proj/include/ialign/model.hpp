#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "ialign/corpus.hpp"
#include "ialign/errors.hpp"
#include "ialign/io.hpp"
#include "ialign/rng.hpp"

namespace ialign {

// ---------------------------------------------------------------------------
// Dense row-major matrix, just enough for these models
// ---------------------------------------------------------------------------

struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }

    std::span<double> row(size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(size_t r) const { return {data.data() + r * cols, cols}; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    bool operator==(const Matrix&) const = default;
};

// ---------------------------------------------------------------------------
// Embedding table
// ---------------------------------------------------------------------------

// Row 0 is the pad vector, pinned to zero and never trained. Content tokens
// are stored lowercase; lookup folds case the same way.
struct EmbeddingTable {
    size_t dim = 0;
    std::vector<std::string> tokens;  // content tokens, row index = position + 3
    std::unordered_map<std::string, size_t> vocab;
    Matrix weights;  // (3 + tokens.size()) x dim

    static constexpr size_t kPadIndex = 0;
    static constexpr size_t kUnkIndex = 1;
    static constexpr size_t kSepIndex = 2;

    bool operator==(const EmbeddingTable&) const = default;

    size_t vocab_size() const { return weights.rows; }

    size_t lookup(const std::string& token) const {
        if (token == kSeparatorToken) return kSepIndex;
        const auto it = vocab.find(to_lower_ascii(token));
        return it == vocab.end() ? kUnkIndex : it->second;
    }

    std::vector<size_t> lookup_all(const TokenSequence& seq) const {
        std::vector<size_t> rows;
        rows.reserve(seq.size());
        for (const std::string& t : seq.tokens) rows.push_back(lookup(t));
        return rows;
    }

    // Vocabulary in first-occurrence order over premise, hypothesis, and
    // (when requested) explanation text. Non-pad rows start uniform in
    // [-0.1, 0.1]; the draw order is row-major and part of the format.
    static EmbeddingTable build(const Corpus& corpus, size_t dim, uint64_t seed,
                                bool include_explanations) {
        if (dim == 0) throw ValidationError("embedding dim must be positive");
        EmbeddingTable table;
        table.dim = dim;
        auto add_tokens = [&table](const TokenSequence& seq) {
            for (const std::string& t : seq.tokens) {
                const std::string key = to_lower_ascii(t);
                if (table.vocab.emplace(key, table.tokens.size() + 3).second)
                    table.tokens.push_back(key);
            }
        };
        for (const Example& e : corpus.examples) {
            add_tokens(tokenize(e.premise));
            add_tokens(tokenize(e.hypothesis));
            if (include_explanations && e.has_explanation())
                add_tokens(tokenize(e.explanation));
        }
        table.weights = Matrix(3 + table.tokens.size(), dim);
        Rng rng = derive_stream(seed, "embedding-init");
        for (size_t r = kUnkIndex; r < table.weights.rows; ++r)
            for (size_t c = 0; c < dim; ++c) table.weights.at(r, c) = rng.uniform(-0.1, 0.1);
        return table;
    }
};

// ---------------------------------------------------------------------------
// Labels for the explanation-informed task
// ---------------------------------------------------------------------------

enum class TaskKind { nli_3way, explanation_informed_6way };

inline const char* task_name(TaskKind t) {
    return t == TaskKind::nli_3way ? "nli_3way" : "explanation_informed_6way";
}

inline TaskKind task_from_name(const std::string& s) {
    if (s == "nli_3way") return TaskKind::nli_3way;
    if (s == "explanation_informed_6way") return TaskKind::explanation_informed_6way;
    throw ValidationError("unknown task \"" + s + "\"");
}

// Classes 0..2 are the NLI labels with a matched explanation, 3..5 the same
// labels with a mismatched one.
struct SixWayLabel {
    Label nli_label = Label::entailment;
    bool explanation_matched = true;

    int index() const {
        return label_index(nli_label) + (explanation_matched ? 0 : kNumLabels);
    }
    static SixWayLabel from_index(int i) {
        if (i < 0 || i >= 2 * kNumLabels) throw IndexError("six-way index out of range");
        return {label_from_index(i % kNumLabels), i < kNumLabels};
    }
};

// ---------------------------------------------------------------------------
// Classifier
// ---------------------------------------------------------------------------

enum class Architecture { bag_of_embeddings_linear, mean_embedding_mlp };

inline const char* architecture_name(Architecture a) {
    return a == Architecture::bag_of_embeddings_linear ? "bag_of_embeddings_linear"
                                                       : "mean_embedding_mlp";
}

inline Architecture architecture_from_name(const std::string& s) {
    if (s == "bag_of_embeddings_linear") return Architecture::bag_of_embeddings_linear;
    if (s == "mean_embedding_mlp") return Architecture::mean_embedding_mlp;
    throw ValidationError("unknown architecture \"" + s + "\"");
}

namespace detail {

inline std::vector<double> softmax(std::vector<double> z) {
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
}

}  // namespace detail

// Mean-pooled embedding classifier. The linear variant maps the mean token
// embedding straight to class scores; the MLP inserts one tanh hidden layer.
// Both are smooth in the embedded input, which integrated gradients requires.
class Classifier {
public:
    Architecture architecture = Architecture::bag_of_embeddings_linear;
    TaskKind task = TaskKind::nli_3way;
    EmbeddingTable embedding;
    int num_classes = kNumLabels;
    uint64_t rng_seed = 0;
    std::string model_id;

    Matrix w_out;                  // num_classes x (dim | hidden_dim)
    std::vector<double> b_out;     // num_classes
    Matrix w_hidden;               // hidden_dim x dim (MLP only)
    std::vector<double> b_hidden;  // hidden_dim (MLP only)

    size_t input_dim() const { return embedding.dim; }
    size_t hidden_dim() const { return w_hidden.rows; }

    Matrix embed(const TokenSequence& seq) const {
        Matrix m(seq.size(), embedding.dim);
        for (size_t i = 0; i < seq.size(); ++i) {
            const auto src = embedding.weights.row(embedding.lookup(seq.tokens[i]));
            std::copy(src.begin(), src.end(), m.row(i).begin());
        }
        return m;
    }

    std::vector<double> presoftmax(const Matrix& embedded) const {
        check_input(embedded);
        std::vector<double> mean_vec(embedding.dim, 0.0);
        for (size_t i = 0; i < embedded.rows; ++i) {
            const auto row = embedded.row(i);
            for (size_t d = 0; d < embedding.dim; ++d) mean_vec[d] += row[d];
        }
        for (double& v : mean_vec) v /= static_cast<double>(embedded.rows);
        return presoftmax_from_mean(mean_vec);
    }

    std::vector<double> forward(const Matrix& embedded) const {
        return detail::softmax(presoftmax(embedded));
    }

    // Pre-softmax score of one class: the F of the attribution path.
    double score(const Matrix& embedded, int class_index) const {
        check_class(class_index);
        return presoftmax(embedded)[static_cast<size_t>(class_index)];
    }

    int predict_class(const Matrix& embedded) const {
        const std::vector<double> z = presoftmax(embedded);
        return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
    }

    Label predict_label(const TokenSequence& seq) const {
        return label_from_index(predict_class(embed(seq)) % kNumLabels);
    }

    SixWayLabel predict_six_way(const TokenSequence& seq) const {
        if (num_classes != 2 * kNumLabels)
            throw ValidationError("predict_six_way requires a 6-class model");
        return SixWayLabel::from_index(predict_class(embed(seq)));
    }

    // d(presoftmax score of class_index) / d(embedded input), analytically.
    Matrix gradient_wrt_embeddings(const Matrix& embedded, int class_index) const {
        check_input(embedded);
        check_class(class_index);
        const size_t n = embedded.rows;
        const size_t dim = embedding.dim;
        const size_t c = static_cast<size_t>(class_index);
        std::vector<double> grad_mean(dim, 0.0);

        if (architecture == Architecture::bag_of_embeddings_linear) {
            const auto w = w_out.row(c);
            std::copy(w.begin(), w.end(), grad_mean.begin());
        } else {
            std::vector<double> mean_vec(dim, 0.0);
            for (size_t i = 0; i < n; ++i) {
                const auto row = embedded.row(i);
                for (size_t d = 0; d < dim; ++d) mean_vec[d] += row[d];
            }
            for (double& v : mean_vec) v /= static_cast<double>(n);

            const std::vector<double> h = hidden_activation(mean_vec);
            const auto w2 = w_out.row(c);
            // Back through tanh: d(score)/d(pre-activation_j) = w2_j (1 - h_j^2)
            for (size_t j = 0; j < h.size(); ++j) {
                const double delta = w2[j] * (1.0 - h[j] * h[j]);
                const auto w1 = w_hidden.row(j);
                for (size_t d = 0; d < dim; ++d) grad_mean[d] += delta * w1[d];
            }
        }

        Matrix grad(n, dim);
        for (size_t i = 0; i < n; ++i)
            for (size_t d = 0; d < dim; ++d)
                grad.at(i, d) = grad_mean[d] / static_cast<double>(n);
        return grad;
    }

    bool operator==(const Classifier&) const = default;

private:
    void check_input(const Matrix& embedded) const {
        if (embedded.rows == 0) throw ShapeError("forward: empty input");
        if (embedded.cols != embedding.dim)
            throw ShapeError("forward: embedded input has dim " +
                             std::to_string(embedded.cols) + ", model expects " +
                             std::to_string(embedding.dim));
    }
    void check_class(int class_index) const {
        if (class_index < 0 || class_index >= num_classes)
            throw IndexError("class index " + std::to_string(class_index) +
                             " out of range for " + std::to_string(num_classes) +
                             " classes");
    }

    std::vector<double> hidden_activation(const std::vector<double>& mean_vec) const {
        std::vector<double> h(w_hidden.rows);
        for (size_t j = 0; j < w_hidden.rows; ++j) {
            double a = b_hidden[j];
            const auto w1 = w_hidden.row(j);
            for (size_t d = 0; d < mean_vec.size(); ++d) a += w1[d] * mean_vec[d];
            h[j] = std::tanh(a);
        }
        return h;
    }

    std::vector<double> presoftmax_from_mean(const std::vector<double>& mean_vec) const {
        const std::vector<double>* features = &mean_vec;
        std::vector<double> h;
        if (architecture == Architecture::mean_embedding_mlp) {
            h = hidden_activation(mean_vec);
            features = &h;
        }
        std::vector<double> z(static_cast<size_t>(num_classes));
        for (size_t c = 0; c < z.size(); ++c) {
            double v = b_out[c];
            const auto w = w_out.row(c);
            for (size_t d = 0; d < features->size(); ++d) v += w[d] * (*features)[d];
            z[c] = v;
        }
        return z;
    }
};

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainingConfig {
    int epochs = 2;
    double learning_rate = 1.0;
    int batch_size = 8;
    uint64_t seed = 0;
    TaskKind task = TaskKind::nli_3way;
    Architecture architecture = Architecture::bag_of_embeddings_linear;
    size_t embedding_dim = 32;
    size_t hidden_dim = 32;
    std::string model_id;
};

namespace detail {

struct TrainInstance {
    std::vector<size_t> rows;  // embedding row per token
    int target = 0;
};

// Gradient state for one mini-batch; dense because reference vocabularies
// are small.
struct BatchGrads {
    Matrix w_out, w_hidden, emb;
    std::vector<double> b_out, b_hidden;

    explicit BatchGrads(const Classifier& m)
        : w_out(m.w_out.rows, m.w_out.cols),
          w_hidden(m.w_hidden.rows, m.w_hidden.cols),
          emb(m.embedding.weights.rows, m.embedding.dim),
          b_out(m.b_out.size(), 0.0),
          b_hidden(m.b_hidden.size(), 0.0) {}

    void reset() {
        w_out.fill(0.0);
        w_hidden.fill(0.0);
        emb.fill(0.0);
        std::fill(b_out.begin(), b_out.end(), 0.0);
        std::fill(b_hidden.begin(), b_hidden.end(), 0.0);
    }
};

// Cross-entropy backward pass for one instance, averaged later by batch size.
// Returns the instance loss at the pre-update parameters.
inline double accumulate_instance(const Classifier& model, const TrainInstance& inst,
                                  BatchGrads& g) {
    const size_t dim = model.embedding.dim;
    const size_t n = inst.rows.size();

    std::vector<double> mean_vec(dim, 0.0);
    for (size_t r : inst.rows) {
        const auto row = model.embedding.weights.row(r);
        for (size_t d = 0; d < dim; ++d) mean_vec[d] += row[d];
    }
    for (double& v : mean_vec) v /= static_cast<double>(n);

    std::vector<double> h;  // MLP hidden activation
    const std::vector<double>* features = &mean_vec;
    if (model.architecture == Architecture::mean_embedding_mlp) {
        h.resize(model.w_hidden.rows);
        for (size_t j = 0; j < model.w_hidden.rows; ++j) {
            double a = model.b_hidden[j];
            const auto w1 = model.w_hidden.row(j);
            for (size_t d = 0; d < dim; ++d) a += w1[d] * mean_vec[d];
            h[j] = std::tanh(a);
        }
        features = &h;
    }

    std::vector<double> z(static_cast<size_t>(model.num_classes));
    for (size_t c = 0; c < z.size(); ++c) {
        double v = model.b_out[c];
        const auto w = model.w_out.row(c);
        for (size_t d = 0; d < features->size(); ++d) v += w[d] * (*features)[d];
        z[c] = v;
    }
    const std::vector<double> p = softmax(std::move(z));

    // dL/dz = p - onehot(target)
    std::vector<double> dz(p);
    dz[static_cast<size_t>(inst.target)] -= 1.0;

    std::vector<double> dfeat(features->size(), 0.0);
    for (size_t c = 0; c < dz.size(); ++c) {
        g.b_out[c] += dz[c];
        auto gw = g.w_out.row(c);
        const auto w = model.w_out.row(c);
        for (size_t d = 0; d < features->size(); ++d) {
            gw[d] += dz[c] * (*features)[d];
            dfeat[d] += dz[c] * w[d];
        }
    }

    std::vector<double> dmean(dim, 0.0);
    if (model.architecture == Architecture::mean_embedding_mlp) {
        for (size_t j = 0; j < h.size(); ++j) {
            const double da = dfeat[j] * (1.0 - h[j] * h[j]);
            g.b_hidden[j] += da;
            auto gw1 = g.w_hidden.row(j);
            const auto w1 = model.w_hidden.row(j);
            for (size_t d = 0; d < dim; ++d) {
                gw1[d] += da * mean_vec[d];
                dmean[d] += da * w1[d];
            }
        }
    } else {
        dmean = dfeat;
    }

    for (size_t r : inst.rows) {
        auto ge = g.emb.row(r);
        for (size_t d = 0; d < dim; ++d) ge[d] += dmean[d] / static_cast<double>(n);
    }

    return -std::log(std::max(p[static_cast<size_t>(inst.target)], 1e-300));
}

inline void apply_grads(Classifier& model, const BatchGrads& g, double scale) {
    for (size_t i = 0; i < model.w_out.data.size(); ++i)
        model.w_out.data[i] -= scale * g.w_out.data[i];
    for (size_t i = 0; i < model.b_out.size(); ++i) model.b_out[i] -= scale * g.b_out[i];
    for (size_t i = 0; i < model.w_hidden.data.size(); ++i)
        model.w_hidden.data[i] -= scale * g.w_hidden.data[i];
    for (size_t i = 0; i < model.b_hidden.size(); ++i)
        model.b_hidden[i] -= scale * g.b_hidden[i];
    // Pad row stays pinned to zero.
    const size_t dim = model.embedding.dim;
    for (size_t r = EmbeddingTable::kUnkIndex; r < model.embedding.weights.rows; ++r) {
        auto row = model.embedding.weights.row(r);
        const auto grow = g.emb.row(r);
        for (size_t d = 0; d < dim; ++d) row[d] -= scale * grow[d];
    }
}

}  // namespace detail

// Mean training loss per epoch, measured at the pre-update parameters of
// each mini-batch as the epoch runs.
struct TrainingMetrics {
    std::vector<double> epoch_mean_loss;
};

// Mini-batch gradient descent on cross-entropy with a fixed learning rate.
// The 6-way task presents each example twice per epoch: once with its own
// explanation, once with a donor explanation drawn uniformly from the other
// examples. Deterministic for a fixed (corpus, config).
inline Classifier train(const Corpus& corpus, const TrainingConfig& config,
                        TrainingMetrics* metrics = nullptr) {
    if (corpus.examples.empty()) throw ValidationError("train: empty corpus");
    if (config.epochs <= 0 || config.batch_size <= 0 || config.learning_rate <= 0.0)
        throw ValidationError("train: epochs, batch_size, learning_rate must be positive");
    const bool informed = config.task == TaskKind::explanation_informed_6way;
    if (informed) {
        if (corpus.size() < 2)
            throw ValidationError("train: 6-way task needs at least 2 examples");
        for (const Example& e : corpus.examples)
            if (!e.has_explanation())
                throw ValidationError("train: 6-way task requires explanations; example " +
                                      e.id + " has none");
    }

    Classifier model;
    model.architecture = config.architecture;
    model.task = config.task;
    model.num_classes = informed ? 2 * kNumLabels : kNumLabels;
    model.rng_seed = config.seed;
    model.model_id = config.model_id.empty()
                         ? std::string(architecture_name(config.architecture))
                         : config.model_id;
    model.embedding = EmbeddingTable::build(corpus, config.embedding_dim, config.seed,
                                            informed);

    // Parameter init; the draw order (w_hidden, then w_out) is fixed. Layer
    // weights use fan-balanced uniform bounds so gradients neither vanish
    // nor blow up at the small scales these models run at.
    Rng init = derive_stream(config.seed, "param-init");
    const size_t feat_dim = config.architecture == Architecture::mean_embedding_mlp
                                ? config.hidden_dim
                                : config.embedding_dim;
    auto init_layer = [&init](Matrix& w, size_t fan_in, size_t fan_out) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (double& v : w.data) v = init.uniform(-bound, bound);
    };
    if (config.architecture == Architecture::mean_embedding_mlp) {
        if (config.hidden_dim == 0) throw ValidationError("train: hidden dim must be positive");
        model.w_hidden = Matrix(config.hidden_dim, config.embedding_dim);
        init_layer(model.w_hidden, config.embedding_dim, config.hidden_dim);
        model.b_hidden.assign(config.hidden_dim, 0.0);
    }
    model.w_out = Matrix(static_cast<size_t>(model.num_classes), feat_dim);
    init_layer(model.w_out, feat_dim, static_cast<size_t>(model.num_classes));
    model.b_out.assign(static_cast<size_t>(model.num_classes), 0.0);

    // Token rows are fixed across epochs; only donor pairing is re-drawn.
    std::vector<std::vector<size_t>> input_rows(corpus.size());
    std::vector<std::vector<size_t>> expl_rows(corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
        input_rows[i] = model.embedding.lookup_all(concat_input(corpus.examples[i]));
        if (informed)
            expl_rows[i] =
                model.embedding.lookup_all(tokenize(corpus.examples[i].explanation));
    }
    const size_t sep_row = EmbeddingTable::kSepIndex;
    auto informed_rows = [&](size_t example, size_t donor) {
        std::vector<size_t> rows = input_rows[example];
        rows.push_back(sep_row);
        rows.insert(rows.end(), expl_rows[donor].begin(), expl_rows[donor].end());
        return rows;
    };

    Rng shuffle_rng = derive_stream(config.seed, "train/shuffle");
    Rng mismatch_rng = derive_stream(config.seed, "train/mismatch");
    detail::BatchGrads grads(model);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<detail::TrainInstance> instances;
        if (!informed) {
            instances.reserve(corpus.size());
            for (size_t i = 0; i < corpus.size(); ++i)
                instances.push_back(
                    {input_rows[i], label_index(corpus.examples[i].gold_label)});
        } else {
            instances.reserve(2 * corpus.size());
            for (size_t i = 0; i < corpus.size(); ++i) {
                const Label gold = corpus.examples[i].gold_label;
                instances.push_back(
                    {informed_rows(i, i), SixWayLabel{gold, true}.index()});
                size_t donor = mismatch_rng.uniform_index(corpus.size() - 1);
                if (donor >= i) ++donor;  // uniform over the others
                instances.push_back(
                    {informed_rows(i, donor), SixWayLabel{gold, false}.index()});
            }
        }
        shuffle_rng.shuffle(instances);

        double loss_sum = 0.0;
        const size_t bs = static_cast<size_t>(config.batch_size);
        for (size_t start = 0; start < instances.size(); start += bs) {
            const size_t end = std::min(start + bs, instances.size());
            grads.reset();
            for (size_t k = start; k < end; ++k)
                loss_sum += detail::accumulate_instance(model, instances[k], grads);
            detail::apply_grads(model, grads,
                                config.learning_rate / static_cast<double>(end - start));
        }
        if (metrics)
            metrics->epoch_mean_loss.push_back(loss_sum /
                                               static_cast<double>(instances.size()));
    }
    return model;
}

// Fraction of examples whose predicted NLI label matches gold (3-way models).
inline double nli_accuracy(const Classifier& model, const Corpus& corpus) {
    if (model.num_classes != kNumLabels)
        throw ValidationError("nli_accuracy expects a 3-class model");
    if (corpus.examples.empty()) throw ValidationError("nli_accuracy: empty corpus");
    size_t hits = 0;
    for (const Example& e : corpus.examples)
        if (model.predict_label(concat_input(e)) == e.gold_label) ++hits;
    return static_cast<double>(hits) / static_cast<double>(corpus.size());
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
    return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    Matrix m(j.at("rows").get<size_t>(), j.at("cols").get<size_t>());
    m.data = j.at("data").get<std::vector<double>>();
    if (m.data.size() != m.rows * m.cols)
        throw ValidationError("checkpoint matrix has inconsistent shape");
    return m;
}

}  // namespace detail

inline constexpr const char* kCheckpointFormat = "ialign-classifier-v1";

inline nlohmann::json classifier_to_json(const Classifier& model) {
    nlohmann::json j;
    j["format"] = kCheckpointFormat;
    j["architecture"] = architecture_name(model.architecture);
    j["task"] = task_name(model.task);
    j["num_classes"] = model.num_classes;
    j["rng_seed"] = model.rng_seed;
    j["model_id"] = model.model_id;
    j["embedding"] = {{"dim", model.embedding.dim},
                      {"tokens", model.embedding.tokens},
                      {"weights", detail::matrix_to_json(model.embedding.weights)}};
    j["w_out"] = detail::matrix_to_json(model.w_out);
    j["b_out"] = model.b_out;
    if (model.architecture == Architecture::mean_embedding_mlp) {
        j["w_hidden"] = detail::matrix_to_json(model.w_hidden);
        j["b_hidden"] = model.b_hidden;
    }
    return j;
}

inline Classifier classifier_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", "") != kCheckpointFormat)
        throw ValidationError("not a classifier checkpoint");
    Classifier model;
    model.architecture = architecture_from_name(j.at("architecture").get<std::string>());
    model.task = task_from_name(j.at("task").get<std::string>());
    model.num_classes = j.at("num_classes").get<int>();
    model.rng_seed = j.at("rng_seed").get<uint64_t>();
    model.model_id = j.at("model_id").get<std::string>();

    const nlohmann::json& emb = j.at("embedding");
    model.embedding.dim = emb.at("dim").get<size_t>();
    model.embedding.tokens = emb.at("tokens").get<std::vector<std::string>>();
    model.embedding.weights = detail::matrix_from_json(emb.at("weights"));
    if (model.embedding.weights.rows != model.embedding.tokens.size() + 3 ||
        model.embedding.weights.cols != model.embedding.dim)
        throw ValidationError("checkpoint embedding table has inconsistent shape");
    for (size_t i = 0; i < model.embedding.tokens.size(); ++i)
        model.embedding.vocab.emplace(model.embedding.tokens[i], i + 3);

    model.w_out = detail::matrix_from_json(j.at("w_out"));
    model.b_out = j.at("b_out").get<std::vector<double>>();
    if (model.architecture == Architecture::mean_embedding_mlp) {
        model.w_hidden = detail::matrix_from_json(j.at("w_hidden"));
        model.b_hidden = j.at("b_hidden").get<std::vector<double>>();
    }
    if (model.w_out.rows != static_cast<size_t>(model.num_classes) ||
        model.b_out.size() != static_cast<size_t>(model.num_classes))
        throw ValidationError("checkpoint output layer has inconsistent shape");
    return model;
}

inline void save_classifier(const Classifier& model, const std::filesystem::path& path) {
    atomic_write(path, classifier_to_json(model).dump(2) + "\n");
}

inline Classifier load_classifier(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& err) {
        throw ValidationError("checkpoint " + path.string() + ": " + err.what());
    }
    return classifier_from_json(j);
}

}  // namespace ialign
