#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace contagion {

namespace {

// Continued fraction for the incomplete beta function, modified Lentz
// iteration. Converges quickly for x < (a+1)/(a+b+2).
double beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    constexpr int max_iter = 500;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps)
            return h;
    }
    throw error(errc::numeric, "incomplete beta continued fraction did not converge");
}

struct Moments {
    double mean_x, mean_y, sxx, syy, sxy;
};

Moments centered_sums(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    return {mx, my, sxx, syy, sxy};
}

void check_paired_input(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw error(errc::invalid_argument, "paired series have unequal lengths");
    if (xs.size() < 3)
        throw error(errc::invalid_argument, "need at least 3 paired observations");
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
            throw error(errc::invalid_argument, "non-finite value in paired series");
}

// Two-tailed p-value for a correlation of rho at sample size n.
double correlation_p(double rho, std::size_t n) {
    const double df = static_cast<double>(n - 2);
    const double denom = 1.0 - rho * rho;
    if (denom <= 0.0)
        return 0.0; // |rho| = 1, limit value
    const double t = rho * std::sqrt(df / denom);
    return 2.0 * (1.0 - student_t_cdf(std::abs(t), df));
}

} // namespace

double incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw error(errc::invalid_argument, "incomplete beta requires positive shape parameters");
    if (!(x >= 0.0 && x <= 1.0))
        throw error(errc::invalid_argument, "incomplete beta requires x in [0, 1]");
    if (x == 0.0)
        return 0.0;
    if (x == 1.0)
        return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0))
        throw error(errc::invalid_argument, "student_t_cdf requires df > 0");
    if (std::isnan(t))
        throw error(errc::invalid_argument, "non-finite t statistic");
    if (std::isinf(t))
        return t > 0.0 ? 1.0 : 0.0;
    if (t == 0.0)
        return 0.5;
    const double half_tail = 0.5 * incomplete_beta(df / (df + t * t), 0.5 * df, 0.5);
    return t > 0.0 ? 1.0 - half_tail : half_tail;
}

double student_t_quantile(double p, double df) {
    if (!(df > 0.0))
        throw error(errc::invalid_argument, "student_t_quantile requires df > 0");
    if (!(p > 0.0 && p < 1.0))
        throw error(errc::invalid_argument, "student_t_quantile requires p in (0, 1)");
    if (p == 0.5)
        return 0.0;
    // Bracket then bisect; the CDF is strictly monotone.
    double lo = -1.0, hi = 1.0;
    while (student_t_cdf(lo, df) > p)
        lo *= 2.0;
    while (student_t_cdf(hi, df) < p)
        hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, df) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13 * std::max(1.0, std::abs(hi)))
            break;
    }
    return 0.5 * (lo + hi);
}

RegressionResult ols(std::span<const double> xs, std::span<const double> ys) {
    check_paired_input(xs, ys);
    const std::size_t n = xs.size();
    const Moments m = centered_sums(xs, ys);
    if (m.sxx <= 0.0)
        throw error(errc::invalid_argument, "degenerate regressor: zero variance");

    RegressionResult r;
    r.n_obs = static_cast<int>(n);
    r.C_hat = m.sxy / m.sxx;
    r.B_hat = m.mean_y - r.C_hat * m.mean_x;

    const double ss_res = std::max(0.0, m.syy - r.C_hat * m.sxy);
    r.r2 = m.syy > 0.0 ? 1.0 - ss_res / m.syy : 1.0;

    const double df = static_cast<double>(n - 2);
    const double sigma2 = ss_res / df;
    const double se_C = std::sqrt(sigma2 / m.sxx);
    const double se_B =
        std::sqrt(sigma2 * (1.0 / static_cast<double>(n) + m.mean_x * m.mean_x / m.sxx));
    const double tq = student_t_quantile(0.975, df);
    r.ci95_C = tq * se_C;
    r.ci95_B = tq * se_B;

    // The slope p-value is defined as the p-value of the x-y correlation,
    // which coincides with the slope t-test for simple regression.
    const double rho = m.syy > 0.0 ? m.sxy / std::sqrt(m.sxx * m.syy) : 0.0;
    r.p = correlation_p(rho, n);
    return r;
}

CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys) {
    check_paired_input(xs, ys);
    const Moments m = centered_sums(xs, ys);
    if (m.sxx <= 0.0 || m.syy <= 0.0)
        throw error(errc::invalid_argument, "degenerate series: zero variance");
    CorrelationResult c;
    c.n = static_cast<int>(xs.size());
    c.rho = std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
    c.p = correlation_p(c.rho, xs.size());
    return c;
}

double grubbs_critical(std::size_t n, double alpha) {
    if (n < 3)
        throw error(errc::invalid_argument, "grubbs requires n >= 3");
    if (alpha <= 0.0)
        return std::numeric_limits<double>::infinity();
    const double nn = static_cast<double>(n);
    const double df = nn - 2.0;
    const double q = std::min(1.0 - 1e-16, 1.0 - alpha / (2.0 * nn));
    const double t = student_t_quantile(q, df);
    return (nn - 1.0) / std::sqrt(nn) * std::sqrt(t * t / (df + t * t));
}

std::optional<GrubbsResult> grubbs(std::span<const double> values, double alpha) {
    if (values.size() < 3)
        throw error(errc::invalid_argument, "grubbs requires n >= 3");
    const std::size_t n = values.size();
    double mean = 0.0;
    for (double v : values) {
        if (!std::isfinite(v))
            throw error(errc::invalid_argument, "non-finite value in grubbs input");
        mean += v;
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    const double s = std::sqrt(ss / static_cast<double>(n - 1));
    if (s == 0.0)
        return std::nullopt;

    std::size_t arg = 0;
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(values[i] - mean);
        if (d > dev) {
            dev = d;
            arg = i;
        }
    }
    const double g = dev / s;
    if (!(g > grubbs_critical(n, alpha)))
        return std::nullopt;

    // Invert the critical-value relation to get the p-value of the observed g.
    const double nn = static_cast<double>(n);
    const double df = nn - 2.0;
    const double q = g * g * nn / ((nn - 1.0) * (nn - 1.0));
    double p;
    if (q >= 1.0) {
        p = 0.0; // g at its attainable maximum (n-1)/sqrt(n)
    } else {
        const double t = std::sqrt(df * q / (1.0 - q));
        p = std::clamp(2.0 * nn * (1.0 - student_t_cdf(t, df)), 0.0, 1.0);
    }
    return GrubbsResult{arg, g, p};
}

} // namespace contagion
