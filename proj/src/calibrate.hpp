#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dataio.hpp"
#include "integrate.hpp"
#include "lsq.hpp"
#include "model.hpp"

namespace contagion {

// Settings for the alternating calibration. The initial values are the
// documented starting point of the procedure: u0 = 0.51, u_inf = 0.49,
// a = 1, b = 1, delta = 0.9985, x0 = first reconstructed prevalence.
struct FitConfig {
    UtilityLaw law = UtilityLaw::discounted;
    double tol = 1e-6; // stop when the total error changes by less than this
    int max_itn = 150; // cap on outer iterations
    InnerSolveConfig inner;
    IntegratorConfig integrator;
    UniversalParams initial_universal{1.0, 0.9985};
    double initial_a = 1.0;
    double initial_u0 = 0.51;
    double initial_u_inf = 0.49;
    double a_max = 2.0; // box: 0 <= a <= a_max
    double b_max = 2.0; // box: 0 <= b <= b_max
};

// Per-country outcome of a calibration. For the constant utility law the
// single utility value is stored in params.u0 (u_inf mirrors it); t_star is
// meaningful only under the step law.
struct LocalFit {
    CountryParams params;
    double t_star = 0.0;
    double error = 0.0;   // sum of squared residuals over this country's years
    bool flagged = false; // inner solver exhausted its evaluation budget
};

struct FitResult {
    UtilityLaw law = UtilityLaw::discounted;
    UniversalParams universal;
    std::map<int, LocalFit> locals; // keyed by country id
    double total_error = 0.0;
    int outer_iterations = 0;
    bool converged = false; // error change fell below tol before max_itn
    std::vector<double> outer_errors; // total error after each outer iteration
    std::vector<std::string> warnings;
};

// Builds the utility-of-smoking time course for one country under the given
// law. The article series is required only by the discounted law.
UtilityModel make_utility(UtilityLaw law, const CountryParams& local,
                          const UniversalParams& universal, double t_star,
                          std::shared_ptr<const ArticleSeries> articles);

// Model-minus-data residuals for one country: the trajectory starts at
// (t_k[0], x0) and is compared against the reconstructed prevalence at every
// recorded year. Integration failures are rethrown naming the country.
std::vector<double> residuals(const EstimatedPrevalence& est, const CountryParams& local,
                              const UniversalParams& universal, const UtilityModel& utility,
                              const IntegratorConfig& integrator = {});

// Optimizes one country's parameters with the shared parameters held fixed.
// Free coordinates: x0, a, u0, u_inf (discounted); x0, a, u (constant);
// x0, a, u0, u_inf, t_star (step). Bounds follow FitConfig.
LocalFit fit_local(const EstimatedPrevalence& est, const LocalFit& start,
                   const UniversalParams& universal,
                   std::shared_ptr<const ArticleSeries> articles, const FitConfig& config);

struct UniversalFit {
    UniversalParams params;
    double total_error = 0.0;
    std::map<int, double> per_country_error;
    bool flagged = false;
};

// Optimizes the shared parameters with every country's locals held fixed.
// Free coordinates: b and delta (discounted; delta steered through
// z = ln(1 - delta) so the solver resolves values near 1), b alone otherwise.
UniversalFit fit_universal(const std::vector<EstimatedPrevalence>& ests,
                           const std::map<int, LocalFit>& locals,
                           const UniversalParams& start,
                           std::shared_ptr<const ArticleSeries> articles,
                           const FitConfig& config);

// Full alternating descent: refit every country, refit the shared pair,
// repeat until the total squared error stabilizes or max_itn is reached.
// Every entry of ests must hold a usable reconstruction for a distinct
// country. The total error is monotonically non-increasing across phases.
FitResult alternate_fit(const std::vector<EstimatedPrevalence>& ests,
                        std::shared_ptr<const ArticleSeries> articles,
                        const FitConfig& config = {});

} // namespace contagion
