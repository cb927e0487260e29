#ifndef CONTAGION_MODEL_HPP
#define CONTAGION_MODEL_HPP

#include <memory>
#include <vector>

namespace contagion {

// Per-country parameters of the contagion equation. t0 is the calendar year
// of the first estimated-prevalence observation, where x(t0) = x0.
struct CountryParams {
    double a = 1.0;      // relative conformity exponent, in [0, 2]
    double x0 = 0.0;     // initial prevalence fraction, in [0, 1]
    double u0 = 0.51;    // individual utility with zero knowledge, in [0, 1]
    double u_inf = 0.49; // individual utility with perfect knowledge, in [0, 1]
    double t0 = 0.0;
};

// Parameters shared by every country in a fit.
struct UniversalParams {
    double b = 1.0;        // timescale, per year, in [0, 2]
    double delta = 0.9985; // per-article discount factor, in [0, 1]
};

// Annual and cumulative counts of health-effects publications. The cumulative
// column defines n(t) through piecewise-linear interpolation between integer
// years; n(t) = 0 before the first record and stays at the last cumulative
// value afterwards.
class ArticleSeries {
public:
    ArticleSeries(std::vector<int> years, std::vector<long long> annual,
                  std::vector<long long> cumulative);

    // n(t) for real-valued t.
    double cumulative_at(double t) const;

    const std::vector<int>& years() const noexcept { return years_; }
    const std::vector<long long>& annual_counts() const noexcept { return annual_; }
    const std::vector<long long>& cumulative() const noexcept { return cumulative_; }
    std::size_t size() const noexcept { return years_.size(); }

private:
    std::vector<int> years_;
    std::vector<long long> annual_;
    std::vector<long long> cumulative_;
};

enum class UtilityLaw {
    discounted, // u(t) = u_inf + delta^n(t) (u0 - u_inf)
    constant,   // u(t) = u
    step,       // u(t) = u0 for t < t_star, else u_inf
};

// One of the three individual-utility laws. Immutable value; the discounted
// variant shares an article series.
class UtilityModel {
public:
    static UtilityModel discounted(double u0, double u_inf, double delta,
                                   std::shared_ptr<const ArticleSeries> articles);
    static UtilityModel constant(double u);
    static UtilityModel step(double u0, double u_inf, double t_star);

    // Individual utility at calendar year t, always in [0, 1].
    double at(double t) const;

    UtilityLaw law() const noexcept { return law_; }
    double u0() const noexcept { return u0_; }
    double u_inf() const noexcept { return u_inf_; }
    double delta() const noexcept { return delta_; }
    double t_star() const noexcept { return t_star_; }
    const std::shared_ptr<const ArticleSeries>& articles() const noexcept { return articles_; }

private:
    UtilityModel() = default;

    UtilityLaw law_ = UtilityLaw::constant;
    double u0_ = 0.0;
    double u_inf_ = 0.0;
    double delta_ = 1.0;
    double t_star_ = 0.0;
    std::shared_ptr<const ArticleSeries> articles_;
};

// delta^n evaluated as exp(n log delta), stable for n in the tens of
// thousands with delta near 1. Conventions: n = 0 gives 1 (including
// delta = 0), delta = 0 with n > 0 gives 0.
double discount_pow(double delta, double n);

// Right-hand side of the contagion equation,
//   dx/dt = b [ (1-x) x^a u_x - x (1-x)^a (1-u_x) ].
// x is clamped to [0, 1] before exponentiation so that adaptive integrators
// probing slightly outside the unit interval stay well defined. Throws
// error(errc::invalid_argument) on non-finite input.
double rhs(double x, double u_x, double a, double b);

} // namespace contagion

#endif
