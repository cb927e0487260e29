#ifndef CONTAGION_LSQ_HPP
#define CONTAGION_LSQ_HPP

#include <functional>
#include <span>
#include <vector>

namespace contagion {

using ResidualFn = std::function<std::vector<double>(std::span<const double>)>;

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
};

struct InnerSolveConfig {
    int max_fevals = 500; // residual evaluations per solve
    // Relative forward-difference step. The residuals here are routed through
    // an adaptive integrator whose output carries tolerance-level jitter, so
    // the probe must be wide enough that the true response dominates it; a
    // classic sqrt(eps)-sized step turns the Jacobian into noise.
    double fd_rel_step = 1e-3;
    double step_tol = 1e-10;   // stop when the trial step is this small
    double obj_tol = 1e-12;    // stop on relative objective decrease below this
    double lambda_init = 1e-3;
};

struct LsqResult {
    std::vector<double> x;
    double objective = 0.0; // sum of squared residuals at x
    int fevals = 0;
    bool converged = false; // false: stopped on feval budget or no progress
};

// Forward-difference Jacobian of resid at x; steps that would leave the box
// flip to backward differences. J is m x n, row-major.
std::vector<double> forward_jacobian(const ResidualFn& resid, std::span<const double> x,
                                     const Box& box, double fd_rel_step,
                                     std::span<const double> r0, int* fevals = nullptr);

// Box-constrained Levenberg-Marquardt: damped normal equations on the
// coordinates free at the current point (gradient projection holds bound-
// active coordinates fixed), trial points clamped to the box, steps accepted
// only when the objective decreases. The returned objective is never above
// the starting one.
LsqResult lm_box(const ResidualFn& resid, std::vector<double> x0, const Box& box,
                 const InnerSolveConfig& config = {});

} // namespace contagion

#endif
