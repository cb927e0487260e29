#ifndef CONTAGION_INTEGRATE_HPP
#define CONTAGION_INTEGRATE_HPP

#include <functional>
#include <span>
#include <vector>

#include "model.hpp"

namespace contagion {

struct IntegratorConfig {
    double rtol = 1e-6;
    double atol = 1e-9;
    double h_init = 0.1; // years
    double h_max = 5.0;  // years
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> values;
};

// Adaptive Dormand-Prince 5(4) driver for a scalar ODE dx/dt = f(t, x).
// Accepted steps satisfy |err| <= atol + rtol * max(|x|, |x_new|); values at
// eval_times between accepted steps come from cubic-Hermite interpolation on
// the step endpoints. Step acceptance uses safety factor 0.9 with the step
// scale clamped to [0.2, 5.0]. Throws integration_error when the controller
// drives the step below machine-epsilon scale.
Trajectory integrate_scalar(const std::function<double(double, double)>& f, double t0, double x0,
                            std::span<const double> eval_times, const IntegratorConfig& config = {});

// Prevalence trajectory of the contagion equation from x(params.t0) = params.x0.
// eval_times must be non-empty, strictly increasing, with eval_times[0] >= t0.
Trajectory integrate(const CountryParams& params, const UniversalParams& universal,
                     const UtilityModel& utility, std::span<const double> eval_times,
                     const IntegratorConfig& config = {});

} // namespace contagion

#endif
