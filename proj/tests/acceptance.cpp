// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// fail. Tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "ialign/alignment.hpp"
#include "ialign/attribution.hpp"
#include "ialign/corpus.hpp"
#include "ialign/io.hpp"
#include "ialign/model.hpp"
#include "ialign/oracle.hpp"
#include "ialign/rng.hpp"
#include "ialign/runner.hpp"
#include "ialign/stats.hpp"
#include "ialign/stopwords.hpp"
#include "ialign/synthetic.hpp"
#include "support/eval.hpp"
#include "support/fd.hpp"
#include "support/quadrature.hpp"

namespace fs = std::filesystem;
using namespace ialign;

namespace {

struct Check {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), format, a, b, c);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Integrated-gradients completeness
// ---------------------------------------------------------------------------

Check criterion_completeness() {
    constexpr double kMlpTol = 1e-3;  // scaled by 1 + |F(x) - F(baseline)|
    constexpr double kLinearTol = 1e-9;

    double worst_mlp = 0.0;
    int pairs = 0;
    for (uint64_t seed : {401u, 402u, 403u, 404u, 405u}) {
        const Corpus corpus = make_marker_corpus(40, seed);
        TrainingConfig tc;
        tc.architecture = Architecture::mean_embedding_mlp;
        tc.embedding_dim = 12;
        tc.hidden_dim = 10;
        tc.seed = seed;
        const Classifier model = train(corpus, tc);
        IGConfig ig;
        ig.steps = 256;
        for (size_t i = 0; i < 12; ++i) {
            const Example& e = corpus.examples[i];
            const IGResult r = integrated_gradients(model, concat_input(e),
                                                    label_index(e.gold_label), ig);
            const double scale = 1.0 + std::abs(r.score_input - r.score_baseline);
            worst_mlp = std::max(worst_mlp, r.completeness_gap / scale);
            ++pairs;
        }
    }

    double worst_linear = 0.0;
    {
        const Corpus corpus = make_marker_corpus(30, 777);
        TrainingConfig tc;
        tc.embedding_dim = 12;
        tc.seed = 777;
        const Classifier model = train(corpus, tc);
        for (int steps : {1, 3, 17, 256}) {
            IGConfig ig;
            ig.steps = steps;
            for (size_t i = 0; i < 10; ++i) {
                const Example& e = corpus.examples[i];
                const IGResult r = integrated_gradients(model, concat_input(e),
                                                        label_index(e.gold_label), ig);
                worst_linear = std::max(worst_linear, r.completeness_gap);
            }
        }
    }

    Check check;
    check.pass = pairs >= 50 && worst_mlp <= kMlpTol && worst_linear <= kLinearTol;
    check.detail = fmt("mlp worst scaled gap %.2e over %.0f pairs; linear worst gap %.2e",
                       worst_mlp, static_cast<double>(pairs), worst_linear);
    return check;
}

// ---------------------------------------------------------------------------
// 2. Analytic gradients vs central finite differences
// ---------------------------------------------------------------------------

Classifier random_classifier(Architecture arch, size_t dim, int classes, size_t hidden,
                             uint64_t seed) {
    Classifier m;
    m.architecture = arch;
    m.num_classes = classes;
    m.embedding.dim = dim;
    m.embedding.weights = Matrix(3, dim);
    Rng rng(seed);
    const size_t feat = arch == Architecture::mean_embedding_mlp ? hidden : dim;
    if (arch == Architecture::mean_embedding_mlp) {
        m.w_hidden = Matrix(hidden, dim);
        for (double& v : m.w_hidden.data) v = rng.uniform(-1.0, 1.0);
        m.b_hidden.resize(hidden);
        for (double& v : m.b_hidden) v = rng.uniform(-0.5, 0.5);
    }
    m.w_out = Matrix(static_cast<size_t>(classes), feat);
    for (double& v : m.w_out.data) v = rng.uniform(-1.0, 1.0);
    m.b_out.resize(static_cast<size_t>(classes));
    for (double& v : m.b_out) v = rng.uniform(-0.5, 0.5);
    return m;
}

Check criterion_gradients() {
    constexpr double kTol = 1e-5;
    constexpr double kStep = 1e-4;

    double worst = 0.0;
    for (Architecture arch :
         {Architecture::bag_of_embeddings_linear, Architecture::mean_embedding_mlp}) {
        Rng rng(derive_stream_seed(55, "acceptance/fd"));
        for (int trial = 0; trial < 20; ++trial) {
            const size_t dim = 3 + rng.uniform_index(5);
            const int classes = 2 + static_cast<int>(rng.uniform_index(5));
            const Classifier m =
                random_classifier(arch, dim, classes, 4 + rng.uniform_index(4),
                                  rng.next_u64());
            Matrix x(1 + rng.uniform_index(7), dim);
            for (double& v : x.data) v = rng.uniform(-1.0, 1.0);
            const int target = static_cast<int>(rng.uniform_index(classes));
            const Matrix analytic = m.gradient_wrt_embeddings(x, target);
            const Matrix numeric = testoracle::fd_gradient(m, x, target, kStep);
            worst = std::max(worst, testoracle::max_relative_error(analytic, numeric));
        }
    }

    Check check;
    check.pass = worst < kTol;
    check.detail = fmt("worst relative error %.2e over 20 cases per architecture", worst);
    return check;
}

// ---------------------------------------------------------------------------
// 3. Statistical kernels against independent references
// ---------------------------------------------------------------------------

Check criterion_stats() {
    constexpr double kFisherTol = 1e-6;
    constexpr double kCdfTol = 1e-6;

    const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> ys = {1.0, 3.0, 2.0, 4.0};
    const bool pearson_exact = pearson(xs, ys) == 0.8;

    const bool fisher_ok = std::abs(fisher(0.5) - 0.549306) <= kFisherTol;

    double worst_cdf = 0.0;
    for (int df : {1, 5, 30})
        for (double t : {-5.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0})
            worst_cdf = std::max(
                worst_cdf, std::abs(student_t_cdf(t, df) - testoracle::t_cdf(t, df)));

    const TTestResult tt = paired_t_test(std::vector<double>{0.0, 2.0});
    const bool cauchy_exact = tt.t == 1.0 && tt.df == 1 && tt.p_one_sided == 0.25;

    Check check;
    check.pass = pearson_exact && fisher_ok && worst_cdf <= kCdfTol && cauchy_exact;
    check.detail = fmt("pearson exact %.0f; fisher err %.2e; cdf err %.2e",
                       pearson_exact ? 1.0 : 0.0, std::abs(fisher(0.5) - 0.549306),
                       worst_cdf) +
                   (cauchy_exact ? "; df=1 p exact" : "; df=1 p NOT exact");
    return check;
}

// ---------------------------------------------------------------------------
// 4 and 5 share a trained model's attribution vectors over the n=200 corpus
// ---------------------------------------------------------------------------

struct ControlContext {
    Corpus corpus;
    Classifier model;
    std::vector<AttributionVector> attributions;
};

ControlContext build_control_context(double* build_seconds) {
    const auto t0 = std::chrono::steady_clock::now();
    ControlContext ctx;
    ctx.corpus = make_alignment_corpus(200, 424242);
    TrainingConfig tc;
    tc.embedding_dim = 16;
    tc.seed = 31;
    ctx.model = train(ctx.corpus, tc);
    const IGConfig ig;
    for (const Example& e : ctx.corpus.examples)
        ctx.attributions.push_back(model_importance(ctx.model, e, ig));
    *build_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return ctx;
}

OracleVector synthetic_oracle(const std::string& id, const std::string& donor,
                              std::vector<double> values) {
    OracleVector v;
    v.example_id = id;
    v.kind = OracleKind::hard;
    v.explanation_id = donor;
    v.per_token = std::move(values);
    return v;
}

// context_seconds covers training and attribution, which count toward the
// positive control's runtime budget.
Check criterion_positive_control(const ControlContext& ctx, double context_seconds) {
    constexpr double kMaxSeconds = 60.0;
    constexpr double kPThreshold = 0.001;

    const auto t0 = std::chrono::steady_clock::now();

    Rng perm = derive_stream(424242, "acceptance/positive");
    std::vector<AlignmentRecord> records;
    for (const AttributionVector& att : ctx.attributions) {
        std::vector<double> shuffled = att.per_token;
        perm.shuffle(shuffled);
        records.push_back(align_example(
            att, synthetic_oracle(att.example_id, att.example_id, att.per_token),
            synthetic_oracle(att.example_id, "permuted", std::move(shuffled))));
    }
    const DeltaAReport report = delta_A(records);

    double c_matched_sum = 0.0;
    size_t used = 0;
    for (const AlignmentRecord& rec : records) {
        if (!rec.usable()) continue;
        c_matched_sum += *rec.c_matched;
        ++used;
    }
    const double theoretical_max = std::tanh(c_matched_sum / static_cast<double>(used));

    const auto t1 = std::chrono::steady_clock::now();
    const double elapsed =
        context_seconds + std::chrono::duration<double>(t1 - t0).count();

    Check check;
    check.pass = report.delta_A >= 0.9 * theoretical_max && report.p_one_sided &&
                 *report.p_one_sided < kPThreshold && elapsed < kMaxSeconds;
    check.detail =
        fmt("delta_A %.6f vs 0.9 x max %.6f; p %.2e", report.delta_A,
            0.9 * theoretical_max, report.p_one_sided ? *report.p_one_sided : 1.0) +
        fmt("; %.2f s", elapsed);
    return check;
}

Check criterion_null_calibration(const ControlContext& ctx) {
    constexpr double kDeltaBound = 0.05;
    constexpr double kPBound = 0.05;
    constexpr int kRequiredPasses = 18;  // 90% of 20 seeds

    const size_t n = ctx.attributions.size();
    int passes = 0;
    for (uint64_t seed = 9000; seed < 9020; ++seed) {
        Rng rng = derive_stream(seed, "acceptance/null");
        std::vector<AlignmentRecord> records;
        for (size_t i = 0; i < n; ++i) {
            const AttributionVector& att = ctx.attributions[i];
            const size_t len = att.per_token.size();
            std::vector<double> matched =
                resize_cyclic(ctx.attributions[(i + 1) % n].per_token, len);
            std::vector<double> random =
                resize_cyclic(ctx.attributions[(i + 2) % n].per_token, len);
            rng.shuffle(matched);
            rng.shuffle(random);
            records.push_back(align_example(
                att, synthetic_oracle(att.example_id, "null-m", std::move(matched)),
                synthetic_oracle(att.example_id, "null-r", std::move(random))));
        }
        const DeltaAReport report = delta_A(records);
        if (std::abs(report.delta_A) < kDeltaBound && report.p_one_sided &&
            *report.p_one_sided > kPBound)
            ++passes;
    }

    Check check;
    check.pass = passes >= kRequiredPasses;
    check.detail = fmt("%.0f of 20 seeds quiet (need %.0f)", static_cast<double>(passes),
                       static_cast<double>(kRequiredPasses));
    return check;
}

// ---------------------------------------------------------------------------
// 6. Hard-oracle truth table
// ---------------------------------------------------------------------------

Check criterion_hard_oracle() {
    const StopWordList stops = default_stop_words();

    const OracleVector suppressed =
        hard_oracle(tokenize("A dog runs"), tokenize("the dog is running"), stops);
    const OracleVector identity = hard_oracle(tokenize("harbor lantern meadow"),
                                              tokenize("harbor lantern meadow"), stops);
    const OracleVector all_stop =
        hard_oracle(tokenize("the is not"), tokenize("the is not anything"), stops);

    Check check;
    check.pass = suppressed.per_token == std::vector<double>{0.0, 1.0, 0.0} &&
                 identity.per_token == std::vector<double>{1.0, 1.0, 1.0} &&
                 all_stop.per_token == std::vector<double>{0.0, 0.0, 0.0};
    check.detail = check.pass ? "stop-word suppression, identity, all-stop-word exact"
                              : "truth table mismatch";
    return check;
}

// ---------------------------------------------------------------------------
// 7. Expert-oracle vote arithmetic
// ---------------------------------------------------------------------------

Check criterion_expert_oracle() {
    ExpertAnnotationSet set;
    set.example_id = "e1";
    set.annotator_ids = {"a", "b", "c"};
    set.votes = {{1}, {1}, {0}};
    const OracleVector v = expert_oracle(set);

    Check check;
    check.pass = v.per_token.size() == 1 && v.per_token[0] == 2.0 / 3.0;
    check.detail = fmt("votes [1,1,0] -> %.17g (expect 2/3 exactly)", v.per_token[0]);
    return check;
}

// ---------------------------------------------------------------------------
// 8. End-to-end determinism, bitwise
// ---------------------------------------------------------------------------

Check criterion_determinism() {
    const Corpus corpus = make_alignment_corpus(120, 777777);
    const auto experts = make_expert_annotations(corpus, 40, 3, 777777);
    const StopWordList stops = default_stop_words();

    TrainingConfig tc;
    tc.embedding_dim = 12;
    tc.seed = 61;
    tc.model_id = "det_bow";
    const Classifier bow = train(corpus, tc);
    tc.task = TaskKind::explanation_informed_6way;
    tc.architecture = Architecture::mean_embedding_mlp;
    tc.hidden_dim = 12;
    tc.model_id = "det_informed";
    tc.seed = 62;
    const Classifier informed = train(corpus, tc);

    RunConfig config;
    config.corpus_path = "in-memory";
    config.oracles = {OracleKind::hard, OracleKind::soft, OracleKind::expert};
    config.ig.steps = 64;
    config.seed = 2024;

    const fs::path root =
        fs::temp_directory_path() / ("ialign_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);

    bool identical = true;
    std::string compared;
    {
        const AlignOutcome first =
            run_alignment(config, corpus, {bow}, &informed, experts, stops);
        const AlignOutcome second =
            run_alignment(config, corpus, {bow}, &informed, experts, stops);
        write_align_outputs(root / "a", config, first);
        write_align_outputs(root / "b", config, second);
    }
    size_t files = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        const auto name = entry.path().filename();
        if (read_file(entry.path()) != read_file(root / "b" / name)) {
            identical = false;
            compared = "differs: " + name.string();
            break;
        }
        ++files;
    }
    fs::remove_all(root);

    Check check;
    check.pass = identical && files >= 8;
    check.detail = identical ? fmt("%.0f artifacts byte-identical across two runs",
                                   static_cast<double>(files))
                             : compared;
    return check;
}

// ---------------------------------------------------------------------------
// 9. 6-way trainer learns matched-vs-mismatched explanations
// ---------------------------------------------------------------------------

Check criterion_six_way() {
    constexpr double kThreshold = 0.9;

    const Corpus corpus = make_copy_explanation_corpus(600, 17);
    TrainingConfig tc;
    tc.task = TaskKind::explanation_informed_6way;
    tc.embedding_dim = 16;
    tc.epochs = 2;
    tc.seed = 29;
    const Classifier model = train(corpus, tc);
    const double accuracy = testsupport::matched_detection_accuracy(model, corpus);

    Check check;
    check.pass = accuracy >= kThreshold;
    check.detail = fmt("matched-detection accuracy %.4f after 2 epochs (need %.2f)",
                       accuracy, kThreshold);
    return check;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&failures](int num, const char* name, const Check& check) {
        std::printf("%s  %d. %-28s %s\n", check.pass ? "PASS" : "FAIL", num, name,
                    check.detail.c_str());
        if (!check.pass) ++failures;
    };

    report(1, "ig-completeness", criterion_completeness());
    report(2, "gradient-correctness", criterion_gradients());
    report(3, "statistical-kernels", criterion_stats());

    double context_seconds = 0.0;
    const ControlContext ctx = build_control_context(&context_seconds);
    report(4, "positive-control", criterion_positive_control(ctx, context_seconds));
    report(5, "null-calibration", criterion_null_calibration(ctx));

    report(6, "hard-oracle-truth-table", criterion_hard_oracle());
    report(7, "expert-oracle-arithmetic", criterion_expert_oracle());
    report(8, "end-to-end-determinism", criterion_determinism());
    report(9, "six-way-trainer-sanity", criterion_six_way());

    if (failures == 0) {
        std::printf("all 9 criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", failures);
    return 1;
}
