#include <doctest.h>

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "errors.hpp"
#include "stats.hpp"

using namespace contagion;

TEST_CASE("student-t CDF matches frozen high-precision values") {
    CHECK(student_t_cdf(2.0, 10.0) == doctest::Approx(0.9633059826146299).epsilon(1e-12));
    // Extreme df pushes the incomplete beta against its boundary; hold this
    // point to the documented absolute accuracy instead of full precision.
    CHECK(std::abs(student_t_cdf(1.96, 1e6) - 0.9750019662073651) < 1e-10);
    CHECK(student_t_cdf(-1.5, 7.0) == doctest::Approx(0.08864924349498501).epsilon(1e-12));
    CHECK(student_t_cdf(0.0, 3.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("student-t CDF agrees with an independent implementation on a grid") {
    for (double df : {1.0, 2.0, 5.0, 23.0, 120.0}) {
        const boost::math::students_t dist(df);
        for (int i = 0; i < 20; ++i) {
            const double t = -6.0 + 12.0 * i / 19.0;
            const double reference = boost::math::cdf(dist, t);
            CHECK(std::abs(student_t_cdf(t, df) - reference) < 1e-10);
        }
    }
}

TEST_CASE("student-t CDF symmetry") {
    for (double df : {2.0, 9.0, 40.0})
        for (double t : {0.1, 0.8, 2.4, 5.0})
            CHECK(student_t_cdf(t, df) + student_t_cdf(-t, df) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("student-t quantile inverts the CDF") {
    for (double df : {3.0, 8.0, 29.0})
        for (double p : {0.01, 0.05, 0.25, 0.5, 0.9, 0.975, 0.999}) {
            const double q = student_t_quantile(p, df);
            CHECK(student_t_cdf(q, df) == doctest::Approx(p).epsilon(1e-9));
        }
}

TEST_CASE("incomplete beta endpoints and symmetry") {
    CHECK(incomplete_beta(0.0, 2.0, 3.0) == 0.0);
    CHECK(incomplete_beta(1.0, 2.0, 3.0) == 1.0);
    // I_x(a,b) = 1 - I_{1-x}(b,a)
    for (double x : {0.1, 0.37, 0.72})
        CHECK(incomplete_beta(x, 2.5, 4.0) ==
              doctest::Approx(1.0 - incomplete_beta(1.0 - x, 4.0, 2.5)).epsilon(1e-12));
    // I_x(1,1) = x
    CHECK(incomplete_beta(0.3, 1.0, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("least squares reproduces a hand-computed fit") {
    const std::vector<double> xs{0.0, 1.0, 2.0};
    const std::vector<double> ys{1.0, 3.0, 4.0};
    const RegressionResult fit = ols(xs, ys);
    CHECK(fit.C_hat == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(fit.B_hat == doctest::Approx(7.0 / 6.0).epsilon(1e-13));
    CHECK(fit.n_obs == 3);
    CHECK(fit.r2 > 0.9);
    CHECK(fit.ci95_C > 0.0);
    CHECK(fit.ci95_B > 0.0);
}

TEST_CASE("least squares on exact line has r2 = 1 and zero-width intervals") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    std::vector<double> ys;
    for (double x : xs)
        ys.push_back(2.5 * x - 1.0);
    const RegressionResult fit = ols(xs, ys);
    CHECK(fit.C_hat == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(fit.B_hat == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.ci95_C == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("least squares validates its input") {
    const std::vector<double> two{0.0, 1.0};
    CHECK_THROWS_AS(ols(two, two), error);
    const std::vector<double> flat{1.0, 1.0, 1.0};
    const std::vector<double> ys{0.0, 1.0, 2.0};
    CHECK_THROWS_AS(ols(flat, ys), error);
}

TEST_CASE("pearson p-value equals the t-transform tail probability") {
    std::mt19937_64 engine(7);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> xs, ys;
    for (int i = 0; i < 12; ++i) {
        const double x = i + 0.3 * noise(engine);
        xs.push_back(x);
        ys.push_back(0.5 * x + noise(engine));
    }
    const CorrelationResult c = pearson(xs, ys);
    REQUIRE(c.n == 12);
    const double t = c.rho * std::sqrt((c.n - 2) / (1.0 - c.rho * c.rho));
    const double expected = 2.0 * (1.0 - student_t_cdf(std::abs(t), c.n - 2));
    CHECK(c.p == doctest::Approx(expected).epsilon(1e-12));
    CHECK(c.rho > 0.0);
}

TEST_CASE("pearson handles perfectly correlated input") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> ys{2.0, 4.0, 6.0, 8.0};
    const CorrelationResult c = pearson(xs, ys);
    CHECK(c.rho == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.p == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pearson slope p-value matches the regression p-value") {
    const std::vector<double> xs{0.0, 1.0, 2.0, 3.0, 4.0};
    const std::vector<double> ys{0.2, 1.1, 1.8, 3.3, 3.9};
    CHECK(ols(xs, ys).p == doctest::Approx(pearson(xs, ys).p).epsilon(1e-12));
}

TEST_CASE("grubbs flags a gross outlier") {
    const std::vector<double> values{0.0, 0.0, 0.0, 0.0, 10.0};
    const auto hit = grubbs(values, 0.05);
    REQUIRE(hit.has_value());
    CHECK(hit->index == 4);
    CHECK(hit->g == doctest::Approx(1.7888543819998317).epsilon(1e-12));
    CHECK(hit->p < 0.05);
    CHECK(grubbs_critical(5, 0.05) == doctest::Approx(1.7150373123433635).epsilon(1e-10));
}

TEST_CASE("grubbs leaves well-behaved samples alone") {
    const std::vector<double> values{1.0, 1.1, 0.9, 1.05, 0.95, 1.02};
    CHECK_FALSE(grubbs(values, 0.05).has_value());
    // Degenerate all-equal sample: zero variance, nothing to flag.
    const std::vector<double> flat{2.0, 2.0, 2.0, 2.0};
    CHECK_FALSE(grubbs(flat, 0.05).has_value());
}

TEST_CASE("grubbs p-value is consistent with the critical value") {
    // By construction g == grubbs_critical(n, p) when p is the reported
    // p-value, so inverting at alpha = p must reproduce g.
    const std::vector<double> values{3.1, 2.9, 3.0, 3.05, 4.2, 3.02, 2.95};
    const auto hit = grubbs(values, 0.20);
    REQUIRE(hit.has_value());
    CHECK(grubbs_critical(values.size(), hit->p) == doctest::Approx(hit->g).epsilon(1e-6));
}

TEST_CASE("grubbs requires at least three values") {
    const std::vector<double> two{0.0, 5.0};
    CHECK_THROWS_AS(grubbs(two, 0.05), error);
}

TEST_CASE("statistics are invariant under affine rescaling") {
    const std::vector<double> xs{0.0, 1.0, 2.0, 3.0, 5.0, 8.0};
    const std::vector<double> ys{0.1, 0.9, 2.2, 2.8, 5.4, 7.7};
    std::vector<double> xs2, ys2;
    for (double x : xs)
        xs2.push_back(3.0 * x - 7.0);
    for (double y : ys)
        ys2.push_back(-2.0 * y + 11.0);
    const CorrelationResult c1 = pearson(xs, ys);
    const CorrelationResult c2 = pearson(xs2, ys2);
    CHECK(c1.rho == doctest::Approx(-c2.rho).epsilon(1e-12));
    CHECK(c1.p == doctest::Approx(c2.p).epsilon(1e-10));
}
