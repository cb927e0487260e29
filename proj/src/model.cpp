#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace contagion {

ArticleSeries::ArticleSeries(std::vector<int> years, std::vector<long long> annual,
                             std::vector<long long> cumulative)
    : years_(std::move(years)), annual_(std::move(annual)), cumulative_(std::move(cumulative)) {
    if (years_.empty())
        throw error(errc::invalid_argument, "article series is empty");
    if (annual_.size() != years_.size() || cumulative_.size() != years_.size())
        throw error(errc::invalid_argument, "article series columns have unequal lengths");
    for (std::size_t k = 0; k < years_.size(); ++k) {
        if (k > 0 && years_[k] <= years_[k - 1])
            throw error(errc::validation,
                        "article series years not strictly increasing at " + std::to_string(years_[k]));
        if (annual_[k] < 0 || cumulative_[k] < 0)
            throw error(errc::validation,
                        "negative article count in year " + std::to_string(years_[k]));
        const long long prev = k > 0 ? cumulative_[k - 1] : 0;
        if (cumulative_[k] != prev + annual_[k] && k > 0)
            throw error(errc::validation,
                        "cumulative article count inconsistent at year " + std::to_string(years_[k]));
    }
}

double ArticleSeries::cumulative_at(double t) const {
    if (!std::isfinite(t))
        throw error(errc::invalid_argument, "non-finite time in article lookup");
    if (t < years_.front())
        return 0.0;
    if (t >= years_.back())
        return static_cast<double>(cumulative_.back());
    // Index of the knot at or before t.
    const auto it = std::upper_bound(years_.begin(), years_.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - years_.begin());
    const std::size_t lo = hi - 1;
    const double t_lo = years_[lo];
    const double t_hi = years_[hi];
    const double c_lo = static_cast<double>(cumulative_[lo]);
    const double c_hi = static_cast<double>(cumulative_[hi]);
    const double w = (t - t_lo) / (t_hi - t_lo);
    return c_lo + w * (c_hi - c_lo);
}

UtilityModel UtilityModel::discounted(double u0, double u_inf, double delta,
                                      std::shared_ptr<const ArticleSeries> articles) {
    if (!std::isfinite(u0) || !std::isfinite(u_inf) || !std::isfinite(delta))
        throw error(errc::invalid_argument, "non-finite utility parameter");
    if (!articles)
        throw error(errc::invalid_argument, "discounted utility requires an article series");
    UtilityModel m;
    m.law_ = UtilityLaw::discounted;
    m.u0_ = u0;
    m.u_inf_ = u_inf;
    m.delta_ = delta;
    m.articles_ = std::move(articles);
    return m;
}

UtilityModel UtilityModel::constant(double u) {
    if (!std::isfinite(u))
        throw error(errc::invalid_argument, "non-finite utility parameter");
    UtilityModel m;
    m.law_ = UtilityLaw::constant;
    m.u0_ = u;
    m.u_inf_ = u;
    return m;
}

UtilityModel UtilityModel::step(double u0, double u_inf, double t_star) {
    if (!std::isfinite(u0) || !std::isfinite(u_inf) || !std::isfinite(t_star))
        throw error(errc::invalid_argument, "non-finite utility parameter");
    UtilityModel m;
    m.law_ = UtilityLaw::step;
    m.u0_ = u0;
    m.u_inf_ = u_inf;
    m.t_star_ = t_star;
    return m;
}

double UtilityModel::at(double t) const {
    switch (law_) {
    case UtilityLaw::constant:
        return u0_;
    case UtilityLaw::step:
        return t < t_star_ ? u0_ : u_inf_;
    case UtilityLaw::discounted: {
        const double n = articles_->cumulative_at(t);
        return u_inf_ + discount_pow(delta_, n) * (u0_ - u_inf_);
    }
    }
    return u0_;
}

double discount_pow(double delta, double n) {
    if (n == 0.0)
        return 1.0; // 0^0 := 1
    if (delta == 0.0)
        return 0.0;
    if (delta == 1.0)
        return 1.0;
    return std::exp(n * std::log(delta));
}

double rhs(double x, double u_x, double a, double b) {
    if (!std::isfinite(x) || !std::isfinite(u_x) || !std::isfinite(a) || !std::isfinite(b))
        throw error(errc::invalid_argument, "non-finite input to contagion rhs");
    const double xc = std::clamp(x, 0.0, 1.0);
    const double adoption = (1.0 - xc) * std::pow(xc, a) * u_x;
    const double cessation = xc * std::pow(1.0 - xc, a) * (1.0 - u_x);
    return b * (adoption - cessation);
}

} // namespace contagion
