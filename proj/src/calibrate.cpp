#include "calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include "errors.hpp"

namespace contagion {

namespace {

// delta is optimized through z = ln(1 - delta), which spreads the productive
// region near delta = 1 over an ordinary-sized interval. z = 0 is delta = 0;
// the lower bound caps delta at 1 - 1e-12 (delta = 1 makes the discount
// inert, and the transform is singular there).
constexpr double z_min = -27.631021115928547; // ln(1e-12)

double delta_from_z(double z) { return 1.0 - std::exp(z); }
double z_from_delta(double delta) {
    return std::log(std::max(1.0 - delta, 1e-12));
}

double window_fraction(double t, double lo, double hi) {
    if (!(hi > lo))
        return 0.0;
    return std::clamp((t - lo) / (hi - lo), 0.0, 1.0);
}

void check_estimate(const EstimatedPrevalence& est) {
    if (!est.estimated || est.times.empty() || est.times.size() != est.values.size())
        throw error(errc::invalid_argument,
                    "country " + std::to_string(est.country_id) +
                        " has no usable prevalence reconstruction");
}

double initial_t_star(const EstimatedPrevalence& est) {
    return 0.5 * (est.times.front() + est.times.back());
}

LocalFit initial_local(const EstimatedPrevalence& est, const FitConfig& config) {
    LocalFit lf;
    lf.params.a = config.initial_a;
    lf.params.x0 = std::clamp(est.values.front(), 0.0, 1.0);
    lf.params.u0 = config.initial_u0;
    lf.params.u_inf = config.law == UtilityLaw::constant ? config.initial_u0 : config.initial_u_inf;
    lf.params.t0 = est.times.front();
    lf.t_star = initial_t_star(est);
    return lf;
}

} // namespace

UtilityModel make_utility(UtilityLaw law, const CountryParams& local,
                          const UniversalParams& universal, double t_star,
                          std::shared_ptr<const ArticleSeries> articles) {
    switch (law) {
    case UtilityLaw::discounted:
        return UtilityModel::discounted(local.u0, local.u_inf, universal.delta,
                                        std::move(articles));
    case UtilityLaw::constant:
        return UtilityModel::constant(local.u0);
    case UtilityLaw::step:
        return UtilityModel::step(local.u0, local.u_inf, t_star);
    }
    throw error(errc::invalid_argument, "unknown utility law");
}

std::vector<double> residuals(const EstimatedPrevalence& est, const CountryParams& local,
                              const UniversalParams& universal, const UtilityModel& utility,
                              const IntegratorConfig& integrator) {
    check_estimate(est);
    CountryParams p = local;
    p.t0 = est.times.front();
    Trajectory traj;
    try {
        traj = integrate(p, universal, utility, est.times, integrator);
    } catch (const integration_error& e) {
        throw integration_error(e.failure_time(),
                                "country " + std::to_string(est.country_id) + ": " + e.what());
    }
    std::vector<double> r(est.times.size());
    for (std::size_t k = 0; k < r.size(); ++k)
        r[k] = traj.values[k] - est.values[k];
    return r;
}

LocalFit fit_local(const EstimatedPrevalence& est, const LocalFit& start,
                   const UniversalParams& universal,
                   std::shared_ptr<const ArticleSeries> articles, const FitConfig& config) {
    check_estimate(est);
    const double t_lo = est.times.front();
    const double t_hi = est.times.back();

    // Theta layout: [x0, a, u0, (u_inf), (tau)] where tau is the step year
    // expressed as a fraction of the data window.
    std::vector<double> theta{start.params.x0, start.params.a, start.params.u0};
    Box box{{0.0, 0.0, 0.0}, {1.0, config.a_max, 1.0}};
    if (config.law != UtilityLaw::constant) {
        theta.push_back(start.params.u_inf);
        box.lo.push_back(0.0);
        box.hi.push_back(1.0);
    }
    if (config.law == UtilityLaw::step) {
        theta.push_back(window_fraction(start.t_star, t_lo, t_hi));
        box.lo.push_back(0.0);
        box.hi.push_back(1.0);
    }

    auto unpack = [&](std::span<const double> th) {
        LocalFit lf = start;
        lf.params.x0 = th[0];
        lf.params.a = th[1];
        lf.params.u0 = th[2];
        lf.params.u_inf = config.law == UtilityLaw::constant ? th[2] : th[3];
        lf.params.t0 = t_lo;
        if (config.law == UtilityLaw::step)
            lf.t_star = t_lo + th[4] * (t_hi - t_lo);
        return lf;
    };

    ResidualFn fn = [&](std::span<const double> th) {
        const LocalFit lf = unpack(th);
        const UtilityModel u = make_utility(config.law, lf.params, universal, lf.t_star, articles);
        return residuals(est, lf.params, universal, u, config.integrator);
    };

    const LsqResult sol = lm_box(fn, theta, box, config.inner);
    LocalFit out = unpack(sol.x);
    out.error = sol.objective;
    out.flagged = !sol.converged;
    return out;
}

UniversalFit fit_universal(const std::vector<EstimatedPrevalence>& ests,
                           const std::map<int, LocalFit>& locals,
                           const UniversalParams& start,
                           std::shared_ptr<const ArticleSeries> articles,
                           const FitConfig& config) {
    if (ests.empty())
        throw error(errc::invalid_argument, "no countries to fit");
    for (const auto& est : ests) {
        check_estimate(est);
        if (!locals.count(est.country_id))
            throw error(errc::invalid_argument,
                        "no local parameters for country " + std::to_string(est.country_id));
    }

    const bool with_delta = config.law == UtilityLaw::discounted;
    std::vector<double> theta{start.b};
    Box box{{0.0}, {config.b_max}};
    if (with_delta) {
        theta.push_back(z_from_delta(start.delta));
        box.lo.push_back(z_min);
        box.hi.push_back(0.0);
    }

    auto unpack = [&](std::span<const double> th) {
        UniversalParams u = start;
        u.b = th[0];
        if (with_delta)
            u.delta = delta_from_z(th[1]);
        return u;
    };

    ResidualFn fn = [&](std::span<const double> th) {
        const UniversalParams u = unpack(th);
        std::vector<double> all;
        for (const auto& est : ests) {
            const LocalFit& lf = locals.at(est.country_id);
            const UtilityModel util = make_utility(config.law, lf.params, u, lf.t_star, articles);
            const std::vector<double> r = residuals(est, lf.params, u, util, config.integrator);
            all.insert(all.end(), r.begin(), r.end());
        }
        return all;
    };

    const LsqResult sol = lm_box(fn, theta, box, config.inner);

    UniversalFit out;
    out.params = unpack(sol.x);
    out.flagged = !sol.converged;
    out.total_error = 0.0;
    for (const auto& est : ests) {
        const LocalFit& lf = locals.at(est.country_id);
        const UtilityModel util =
            make_utility(config.law, lf.params, out.params, lf.t_star, articles);
        const std::vector<double> r =
            residuals(est, lf.params, out.params, util, config.integrator);
        double e = 0.0;
        for (double v : r)
            e += v * v;
        out.per_country_error[est.country_id] = e;
        out.total_error += e;
    }
    return out;
}

FitResult alternate_fit(const std::vector<EstimatedPrevalence>& ests,
                        std::shared_ptr<const ArticleSeries> articles,
                        const FitConfig& config) {
    if (ests.empty())
        throw error(errc::invalid_argument, "no countries to fit");
    if (config.law == UtilityLaw::discounted && !articles)
        throw error(errc::invalid_argument, "discounted utility needs an article series");
    if (!(config.tol > 0.0) || config.max_itn < 1)
        throw error(errc::invalid_argument, "fit tolerance and iteration cap must be positive");

    std::vector<EstimatedPrevalence> ordered = ests;
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& lhs, const auto& rhs) { return lhs.country_id < rhs.country_id; });
    {
        std::set<int> ids;
        for (const auto& est : ordered) {
            check_estimate(est);
            if (!ids.insert(est.country_id).second)
                throw error(errc::invalid_argument,
                            "duplicate country " + std::to_string(est.country_id));
        }
    }

    FitResult result;
    result.law = config.law;
    result.universal = config.initial_universal;
    for (const auto& est : ordered)
        result.locals[est.country_id] = initial_local(est, config);

    // Error at the starting point, so the first outer iteration has a
    // reference for the change-based stop rule.
    double prev_error = 0.0;
    for (const auto& est : ordered) {
        const LocalFit& lf = result.locals.at(est.country_id);
        const UtilityModel util =
            make_utility(config.law, lf.params, result.universal, lf.t_star, articles);
        const std::vector<double> r =
            residuals(est, lf.params, result.universal, util, config.integrator);
        for (double v : r)
            prev_error += v * v;
    }

    std::set<int> flagged;
    for (int itn = 1; itn <= config.max_itn; ++itn) {
        result.outer_iterations = itn;

        for (const auto& est : ordered) {
            LocalFit& lf = result.locals.at(est.country_id);
            lf = fit_local(est, lf, result.universal, articles, config);
            if (lf.flagged)
                flagged.insert(est.country_id);
        }

        const UniversalFit uni =
            fit_universal(ordered, result.locals, result.universal, articles, config);
        result.universal = uni.params;
        if (uni.flagged)
            flagged.insert(-1);
        for (auto& [id, lf] : result.locals)
            lf.error = uni.per_country_error.at(id);

        result.total_error = uni.total_error;
        result.outer_errors.push_back(uni.total_error);
        if (uni.total_error > prev_error + 1e-9 * std::max(1.0, prev_error))
            result.warnings.push_back("total error increased during iteration " +
                                      std::to_string(itn) + "; descent is expected to be monotone");
        if (std::abs(prev_error - uni.total_error) < config.tol) {
            result.converged = true;
            break;
        }
        prev_error = uni.total_error;
    }

    for (int id : flagged) {
        if (id < 0)
            result.warnings.push_back("shared-parameter pass stopped on its evaluation budget");
        else
            result.warnings.push_back("country " + std::to_string(id) +
                                      " stopped on its evaluation budget");
    }
    for (const auto& [id, lf] : result.locals) {
        if (config.law != UtilityLaw::constant && lf.params.u0 < lf.params.u_inf)
            result.warnings.push_back("country " + std::to_string(id) +
                                      ": fitted u0 below u_inf (utility rises over time)");
    }
    return result;
}

} // namespace contagion
