#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "calibrate.hpp"
#include "dataio.hpp"
#include "stats.hpp"

namespace contagion {

// Per-country quantities feeding the correlation study.
struct CountryAnalysis {
    int country_id = 0;
    double s_x = 0.0;  // average prevalence slope, fraction per year
    int t_max = 0;     // calendar year of peak consumption
    double a = 0.0;    // fitted conformity exponent
    double idv = 0.0;  // individualism index, NaN when unknown
    double t0_used = 0.0; // actual start year the slope was computed from
};

// Average slope of the reconstructed prevalence between the reference start
// year and the consumption peak.
struct SlopeResult {
    double s_x = 0.0;
    double t0_used = 0.0;   // nearest recorded year to the requested start
    double t_max_used = 0.0; // nearest recorded year to the requested peak
};

// Slope from the year closest to t_start (default 1920; the earliest record
// when the series begins later) to the year closest to t_max. Throws when
// the resolved peak year does not lie after the resolved start year.
SlopeResult average_slope(const EstimatedPrevalence& est, int t_max, int t_start = 1920);

// Year of maximum consumption; ties break toward the earliest year.
int peak_year(const YearSeries& series);

// The six named correlation cells plus run notes.
struct StudyReport {
    CorrelationResult idv_a;      // individualism vs conformity, core set
    CorrelationResult idv_sx;     // individualism vs prevalence slope
    CorrelationResult idv_tmax7;  // individualism vs peak year, core set
    CorrelationResult idv_tmax25; // individualism vs peak year, wide set
    CorrelationResult a_sx;       // conformity vs prevalence slope
    CorrelationResult a_tmax;     // conformity vs peak year
    std::map<UtilityLaw, double> model_comparison; // total error per law
    std::vector<std::string> notes;
};

// Runs all six correlations. `analyses` is the core (typically 7-country)
// set; `full25` carries (idv, t_max) pairs for the wide set. A country with
// unknown IDV raises an error naming it.
StudyReport correlation_study(std::span<const CountryAnalysis> analyses,
                              std::span<const std::pair<double, int>> full25);

// Calibrates the same data once per utility law and reports each law's
// converged total error (keyed results carry the full fit for inspection).
std::map<UtilityLaw, FitResult>
compare_utility_models(const std::vector<EstimatedPrevalence>& ests,
                       std::shared_ptr<const ArticleSeries> articles, const FitConfig& base);

} // namespace contagion
