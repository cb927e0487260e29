#include "integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace contagion {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;

// 5th-order solution weights (row seven of the tableau, FSAL).
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights, for the error estimate.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double safety = 0.9;
constexpr double scale_min = 0.2;
constexpr double scale_max = 5.0;
constexpr long max_steps = 50'000'000;

double hermite(double t0, double x0, double f0, double t1, double x1, double f1, double s) {
    const double h = t1 - t0;
    const double th = (s - t0) / h;
    const double th2 = th * th;
    const double th3 = th2 * th;
    return (2.0 * th3 - 3.0 * th2 + 1.0) * x0 + (th3 - 2.0 * th2 + th) * h * f0 +
           (-2.0 * th3 + 3.0 * th2) * x1 + (th3 - th2) * h * f1;
}

} // namespace

Trajectory integrate_scalar(const std::function<double(double, double)>& f, double t0, double x0,
                            std::span<const double> eval_times, const IntegratorConfig& config) {
    if (eval_times.empty())
        throw error(errc::invalid_argument, "eval_times is empty");
    for (std::size_t i = 0; i < eval_times.size(); ++i) {
        if (!std::isfinite(eval_times[i]))
            throw error(errc::invalid_argument, "non-finite eval time");
        if (i > 0 && eval_times[i] <= eval_times[i - 1])
            throw error(errc::invalid_argument, "eval_times not strictly increasing");
    }
    if (eval_times.front() < t0)
        throw error(errc::invalid_argument, "eval_times start before t0");
    if (!(config.rtol > 0.0) || !(config.atol > 0.0))
        throw error(errc::invalid_argument, "integrator tolerances must be positive");
    if (!(config.h_init > 0.0) || config.h_init > config.h_max)
        throw error(errc::invalid_argument, "integrator steps must satisfy 0 < h_init <= h_max");

    Trajectory out;
    out.times.assign(eval_times.begin(), eval_times.end());
    out.values.resize(eval_times.size());

    std::size_t next_eval = 0;
    if (eval_times.front() == t0)
        out.values[next_eval++] = x0;

    const double t_end = eval_times.back();
    double t = t0;
    double x = x0;
    double k1 = f(t, x);
    double h = std::min(config.h_init, config.h_max);

    long steps = 0;
    while (next_eval < eval_times.size()) {
        h = std::min(h, t_end - t);
        const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0);

        if (++steps > max_steps)
            throw integration_error(t, "integration exceeded step budget at t=" + std::to_string(t));

        const double k2 = f(t + c2 * h, x + h * (a21 * k1));
        const double k3 = f(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
        const double k4 = f(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = f(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 = f(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double x_new = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double k7 = f(t + h, x_new); // FSAL stage

        if (!std::isfinite(x_new))
            throw integration_error(t, "integration produced non-finite state at t=" + std::to_string(t));

        const double err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double tol = config.atol + config.rtol * std::max(std::abs(x), std::abs(x_new));
        const double err_norm = std::abs(err) / tol;

        if (err_norm <= 1.0) {
            const double t_new = t + h;
            while (next_eval < eval_times.size() && eval_times[next_eval] <= t_new) {
                const double s = eval_times[next_eval];
                out.values[next_eval] =
                    s == t_new ? x_new : hermite(t, x, k1, t_new, x_new, k7, s);
                ++next_eval;
            }
            t = t_new;
            x = x_new;
            k1 = k7;
            const double grow =
                err_norm == 0.0 ? scale_max
                                : std::clamp(safety * std::pow(err_norm, -0.2), scale_min, scale_max);
            h = std::min(h * grow, config.h_max);
        } else {
            const double shrink = std::clamp(safety * std::pow(err_norm, -0.2), scale_min, 1.0);
            h *= shrink;
            if (h < h_floor)
                throw integration_error(t, "step size underflow at t=" + std::to_string(t));
        }
    }
    return out;
}

Trajectory integrate(const CountryParams& params, const UniversalParams& universal,
                     const UtilityModel& utility, std::span<const double> eval_times,
                     const IntegratorConfig& config) {
    const double a = params.a;
    const double b = universal.b;
    auto f = [&utility, a, b](double t, double x) { return rhs(x, utility.at(t), a, b); };
    return integrate_scalar(f, params.t0, params.x0, eval_times, config);
}

} // namespace contagion
