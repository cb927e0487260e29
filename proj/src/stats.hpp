#ifndef CONTAGION_STATS_HPP
#define CONTAGION_STATS_HPP

#include <cstddef>
#include <optional>
#include <span>

namespace contagion {

struct RegressionResult {
    double C_hat = 0.0;  // slope
    double B_hat = 0.0;  // intercept
    double ci95_C = 0.0; // 95% confidence half-width of the slope
    double ci95_B = 0.0; // 95% confidence half-width of the intercept
    double r2 = 0.0;
    double p = 1.0; // two-tailed p-value of the slope
    int n_obs = 0;
};

struct CorrelationResult {
    double rho = 0.0;
    double p = 1.0;
    int n = 0;
};

struct GrubbsResult {
    std::size_t index = 0; // arg-max |v - mean| / s
    double g = 0.0;        // the Grubbs statistic
    double p = 1.0;        // two-sided p-value
};

// Ordinary least squares of ys on xs with 95% confidence half-widths from the
// t-quantile at n-2 degrees of freedom. The slope p-value equals the p-value
// of the Pearson correlation between xs and ys. Requires n >= 3 and
// non-degenerate xs.
RegressionResult ols(std::span<const double> xs, std::span<const double> ys);

// Sample Pearson correlation; p is the two-tailed tail probability of
// t = rho sqrt((n-2)/(1-rho^2)) under Student-t with n-2 df. |rho| = 1 reports
// the limit p = 0. Requires n >= 3 and nonzero variance in both series.
CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys);

// Two-sided single-outlier Grubbs test. Returns the arg-max studentized
// deviation when its statistic exceeds the critical value at level alpha,
// none otherwise (including the degenerate all-equal case). Requires n >= 3.
std::optional<GrubbsResult> grubbs(std::span<const double> values, double alpha);

// Critical value of the two-sided Grubbs statistic at level alpha for sample
// size n, via the t-quantile at alpha/(2n) with n-2 df.
double grubbs_critical(std::size_t n, double alpha);

// Student-t CDF via the regularized incomplete beta function; absolute error
// below 1e-10. df must be positive.
double student_t_cdf(double t, double df);

// Inverse of student_t_cdf in its first argument (bisection; monotone CDF).
double student_t_quantile(double p, double df);

// Regularized incomplete beta function I_x(a, b), evaluated with the standard
// continued fraction (modified Lentz).
double incomplete_beta(double x, double a, double b);

} // namespace contagion

#endif
