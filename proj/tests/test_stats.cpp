#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ialign/stats.hpp"
#include "support/quadrature.hpp"

using namespace ialign;

TEST_CASE("mean and sample_sd basics", "[stats]") {
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    CHECK(mean(v) == 5.0);
    CHECK(sample_sd(v) == Catch::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-14));

    CHECK(is_constant(std::vector<double>{3, 3, 3}));
    CHECK(is_constant(std::vector<double>{7}));
    CHECK_FALSE(is_constant(std::vector<double>{3, 3, 4}));
}

TEST_CASE("pearson matches hand-computed values", "[stats]") {
    const std::vector<double> a{1, 2, 3};
    CHECK(pearson(a, a) == 1.0);
    CHECK(pearson(a, std::vector<double>{3, 2, 1}) == -1.0);

    // cov = 4, both variances 5: r = 4/5 with every intermediate exact.
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{1, 3, 2, 4};
    CHECK(pearson(x, y) == 0.8);
}

TEST_CASE("pearson affine invariance and clamping", "[stats]") {
    const std::vector<double> x{0.3, -1.2, 2.7, 0.9, -0.4};
    const std::vector<double> y{1.1, 0.2, -0.8, 2.2, 0.5};
    const double r = pearson(x, y);

    std::vector<double> scaled(x.size());
    for (size_t i = 0; i < x.size(); ++i) scaled[i] = 2.5 * x[i] + 3.0;
    CHECK(pearson(scaled, y) == Catch::Approx(r).margin(1e-12));

    std::vector<double> negated(x.size());
    for (size_t i = 0; i < x.size(); ++i) negated[i] = -x[i];
    CHECK(pearson(negated, y) == Catch::Approx(-r).margin(1e-12));

    // An exactly linear relation must not overshoot |r| = 1.
    std::vector<double> lin(x.size());
    for (size_t i = 0; i < x.size(); ++i) lin[i] = M_PI * x[i] + M_E;
    const double rp = pearson(x, lin);
    CHECK(rp <= 1.0);
    CHECK(rp >= 1.0 - 1e-12);
}

TEST_CASE("pearson rejects bad input", "[stats]") {
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}),
                    ShapeError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}),
                    ShapeError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                    DegenerateError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}),
                    DegenerateError);
}

TEST_CASE("average_ranks assigns mean rank to ties", "[stats]") {
    const std::vector<double> v{10, 20, 20, 30};
    const std::vector<double> expected{1.0, 2.5, 2.5, 4.0};
    CHECK(average_ranks(v) == expected);

    const std::vector<double> flat{5, 5, 5};
    CHECK(average_ranks(flat) == std::vector<double>{2.0, 2.0, 2.0});
}

TEST_CASE("spearman rank correlation", "[stats]") {
    const std::vector<double> a{1, 5, 9, 14};
    std::vector<double> cubed(a.size());
    for (size_t i = 0; i < a.size(); ++i) cubed[i] = a[i] * a[i] * a[i];
    CHECK(spearman(a, cubed) == 1.0);

    const std::vector<double> tied{1, 2, 2, 3};
    CHECK(spearman(tied, tied) == 1.0);

    // Ranks are the identity; Pearson of [1,2,3] vs [1,3,2] is exactly 1/2.
    CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}) == 0.5);

    CHECK_THROWS_AS(spearman(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}),
                    DegenerateError);
}

TEST_CASE("fisher transform", "[stats]") {
    CHECK(fisher(0.0) == 0.0);
    CHECK(fisher(0.5) == Catch::Approx(0.549306).margin(1e-6));
    CHECK(fisher(1.0) == std::atanh(1.0 - 1e-6));
    CHECK(fisher(-1.0) == -fisher(1.0));
    CHECK(fisher(1.0) == Catch::Approx(7.25432).margin(1e-4));
    CHECK_THROWS_AS(fisher(1.0000001), DomainError);
    CHECK_THROWS_AS(fisher(-1.5), DomainError);
}

TEST_CASE("fisher round-trips through tanh", "[stats]") {
    for (double r = -0.999999; r <= 0.999999; r += 0.0271) {
        CAPTURE(r);
        CHECK(fisher_inverse(fisher(r)) == Catch::Approx(r).margin(1e-12));
    }
    CHECK(fisher_inverse(fisher(0.999999)) == Catch::Approx(0.999999).margin(1e-12));
}

TEST_CASE("incomplete beta closed forms", "[stats]") {
    for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        CAPTURE(x);
        CHECK(incomplete_beta(1.0, 1.0, x) == Catch::Approx(x).margin(1e-13));
        CHECK(incomplete_beta(2.0, 2.0, x) ==
              Catch::Approx(3.0 * x * x - 2.0 * x * x * x).margin(1e-13));
        CHECK(incomplete_beta(2.0, 1.0, x) == Catch::Approx(x * x).margin(1e-13));
    }
    // Symmetry identity exercises both continued-fraction branches.
    for (double x : {0.1, 0.3, 0.6, 0.9}) {
        CAPTURE(x);
        CHECK(incomplete_beta(2.5, 1.5, x) ==
              Catch::Approx(1.0 - incomplete_beta(1.5, 2.5, 1.0 - x)).margin(1e-13));
    }
}

TEST_CASE("student_t_cdf matches quadrature oracle", "[stats]") {
    const int dfs[] = {1, 2, 3, 5, 10, 30};
    const double ts[] = {-5.0, -3.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0, 2.0, 3.0, 5.0};
    for (int df : dfs) {
        for (double t : ts) {
            CAPTURE(df, t);
            CHECK(student_t_cdf(t, df) ==
                  Catch::Approx(testoracle::t_cdf(t, df)).margin(1e-6));
        }
    }
}

TEST_CASE("student_t_cdf closed forms and symmetry", "[stats]") {
    // df = 1 is Cauchy; arctan(1)/pi is exactly 0.25 in doubles.
    CHECK(student_t_cdf(1.0, 1) == 0.75);
    CHECK(student_t_cdf(-1.0, 1) == 0.25);
    for (int df : {1, 4, 17}) {
        CHECK(student_t_cdf(0.0, df) == 0.5);
        for (double t : {0.3, 1.7, 4.2}) {
            CAPTURE(df, t);
            CHECK(student_t_cdf(-t, df) + student_t_cdf(t, df) ==
                  Catch::Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("paired_t_test", "[stats]") {
    SECTION("symmetric diffs give t = 0, p = 0.5") {
        const TTestResult res = paired_t_test(std::vector<double>{-1.0, 1.0});
        CHECK(res.t == 0.0);
        CHECK(res.p_one_sided == 0.5);
        CHECK(res.p_two_sided == 1.0);
        CHECK(res.df == 1);
    }
    SECTION("hand-computed statistic") {
        const std::vector<double> diffs{1, 2, 3, 4, 5};
        const TTestResult res = paired_t_test(diffs);
        // t = 3 / (sqrt(2.5)/sqrt(5)) = 3*sqrt(2)
        CHECK(res.t == Catch::Approx(3.0 * std::sqrt(2.0)).margin(1e-12));
        CHECK(res.df == 4);
        const double expect_p = 1.0 - testoracle::t_cdf(res.t, 4);
        CHECK(res.p_one_sided == Catch::Approx(expect_p).margin(1e-6));
        CHECK(res.p_two_sided == Catch::Approx(2.0 * expect_p).margin(1e-6));
    }
    SECTION("df = 1, t = 1 has exact one-sided p") {
        // diffs [0, 2]: mean 1, sd sqrt(2), t = 1/(sqrt(2)/sqrt(2)) = 1.
        const TTestResult res = paired_t_test(std::vector<double>{0.0, 2.0});
        CHECK(res.t == 1.0);
        CHECK(res.df == 1);
        CHECK(res.p_one_sided == 0.25);
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0}), ShapeError);
        CHECK_THROWS_AS(paired_t_test(std::vector<double>{0.3, 0.3, 0.3}),
                        DegenerateError);
    }
}

TEST_CASE("correlation_p_value", "[stats]") {
    // r = 0.8, n = 4: t = 0.8*sqrt(2/0.36), df = 2.
    const CorrelationTest res = correlation_p_value(0.8, 4);
    CHECK(res.df == 2);
    const double t = 0.8 * std::sqrt(2.0 / 0.36);
    CHECK(t == Catch::Approx(1.886).margin(1e-3));
    REQUIRE(res.p_two_sided.has_value());
    CHECK(*res.p_two_sided ==
          Catch::Approx(2.0 * (1.0 - testoracle::t_cdf(t, 2))).margin(1e-6));

    // p is symmetric in the sign of r.
    const CorrelationTest neg = correlation_p_value(-0.8, 4);
    REQUIRE(neg.p_two_sided.has_value());
    CHECK(*neg.p_two_sided == Catch::Approx(*res.p_two_sided).margin(1e-15));

    // |r| = 1 makes the t transform blow up; p is withheld.
    CHECK_FALSE(correlation_p_value(1.0, 5).p_two_sided.has_value());
    CHECK_FALSE(correlation_p_value(-1.0, 5).p_two_sided.has_value());
}
