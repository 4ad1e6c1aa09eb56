#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ialign/errors.hpp"

namespace ialign {

inline double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Exact all-equal test. Used as the zero-variance predicate so that the
// degenerate cases named in the contracts (all-zero oracle, constant
// importance) are detected without floating-point rounding surprises.
inline bool is_constant(std::span<const double> v) {
    for (double x : v)
        if (x != v.front()) return false;
    return true;
}

// Sample standard deviation (n - 1 denominator).
inline double sample_sd(std::span<const double> v) {
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Pearson product-moment correlation. Two-pass form; the result is clamped
// into [-1, 1] to absorb last-ulp overshoot on exactly collinear inputs.
inline double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ShapeError("pearson: length mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
    if (a.size() < 2) throw ShapeError("pearson: need at least 2 points");
    if (is_constant(a)) throw DegenerateError("pearson: first vector has zero variance");
    if (is_constant(b)) throw DegenerateError("pearson: second vector has zero variance");

    const double ma = mean(a);
    const double mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    const double r = sab / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

// Average ranks, 1-based; ties share the mean of their rank run.
inline std::vector<double> average_ranks(std::span<const double> v) {
    const size_t n = v.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t i, size_t j) { return v[i] < v[j]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

// Spearman rank correlation: Pearson over average ranks.
inline double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("spearman: length mismatch");
    if (a.size() < 2) throw ShapeError("spearman: need at least 2 points");
    const std::vector<double> ra = average_ranks(a);
    const std::vector<double> rb = average_ranks(b);
    return pearson(ra, rb);
}

// Fisher transform arctanh(r), with r clamped to [-1+eps, 1-eps] so that
// perfect correlations on short vectors stay finite.
inline double fisher(double r, double epsilon = 1e-6) {
    if (std::abs(r) > 1.0) throw DomainError("fisher: |r| > 1");
    return std::atanh(std::clamp(r, -1.0 + epsilon, 1.0 - epsilon));
}

inline double fisher_inverse(double z) { return std::tanh(z); }

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw DomainError("incomplete_beta: a, b must be positive");
    if (x < 0.0 || x > 1.0) throw DomainError("incomplete_beta: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * detail::beta_cf(a, b, x) / a;
    return 1.0 - bt * detail::beta_cf(b, a, 1.0 - x) / b;
}

// Student-t CDF. General path via the regularized incomplete beta; df = 1 is
// the Cauchy distribution and uses its closed form, which is exact where the
// continued fraction would round.
inline double student_t_cdf(double t, int df) {
    if (df < 1) throw DomainError("student_t_cdf: df must be >= 1");
    if (df == 1) return 0.5 + std::atan(t) / M_PI;
    const double nu = static_cast<double>(df);
    const double x = nu / (nu + t * t);
    const double half_tail = 0.5 * incomplete_beta(nu / 2.0, 0.5, x);
    return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

struct TTestResult {
    double t = 0.0;
    double p_one_sided = 0.0;  // tests mean > 0
    double p_two_sided = 0.0;
    int df = 0;
};

// Paired t-test over a vector of per-example differences.
inline TTestResult paired_t_test(std::span<const double> diffs) {
    if (diffs.size() < 2) throw ShapeError("paired_t_test: need at least 2 differences");
    if (is_constant(diffs)) throw DegenerateError("paired_t_test: zero variance");
    const double sd = sample_sd(diffs);
    if (sd == 0.0) throw DegenerateError("paired_t_test: zero variance");
    const int df = static_cast<int>(diffs.size()) - 1;
    const double t =
        mean(diffs) / (sd / std::sqrt(static_cast<double>(diffs.size())));
    TTestResult res;
    res.t = t;
    res.df = df;
    res.p_one_sided = 1.0 - student_t_cdf(t, df);
    res.p_two_sided = 2.0 * (1.0 - student_t_cdf(std::abs(t), df));
    return res;
}

struct CorrelationTest {
    double r = 0.0;
    std::optional<double> p_two_sided;  // absent when |r| = 1 makes t blow up
    int df = 0;
};

// Exact-t p-value for a correlation coefficient: t = r sqrt((n-2)/(1-r^2)),
// df = n - 2. Valid at the small n this library runs at.
inline CorrelationTest correlation_p_value(double r, size_t n) {
    if (n < 3) throw ShapeError("correlation_p_value: need at least 3 points");
    CorrelationTest out;
    out.r = r;
    out.df = static_cast<int>(n) - 2;
    const double denom = 1.0 - r * r;
    if (denom <= 0.0) return out;  // degenerate: |r| = 1 exactly
    const double t = r * std::sqrt(static_cast<double>(n - 2) / denom);
    out.p_two_sided = 2.0 * (1.0 - student_t_cdf(std::abs(t), out.df));
    return out;
}

}  // namespace ialign
